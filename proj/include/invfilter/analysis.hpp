#pragma once

#include <vector>

#include "invfilter/filters.hpp"
#include "invfilter/problem.hpp"

namespace invfilter {

enum class Regime { assumption1, assumption2 };

// Smoothness/ill-posedness bookkeeping for rate predictions.  assumption1
// carries (s, a); assumption2 the sequence-model triple (beta, eps, p).
// The regimes coincide when a = 2p/(1+2eps) and s = 2beta/(1+2eps).
struct RateParams {
    Regime regime = Regime::assumption1;
    DataModel data_model = DataModel::dm1;
    double s = 1.0;
    double a = 1.0;
    double beta = 1.0;
    double eps = 0.5;
    double p = 1.0;

    static RateParams assumption1(double s, double a, DataModel dm) {
        RateParams r;
        r.regime = Regime::assumption1;
        r.s = s;
        r.a = a;
        r.data_model = dm;
        return r;
    }
    static RateParams assumption2(double beta, double eps, double p, DataModel dm) {
        RateParams r;
        r.regime = Regime::assumption2;
        r.beta = beta;
        r.eps = eps;
        r.p = p;
        r.data_model = dm;
        return r;
    }
};

// The data-model/regime-appropriate prior scaling for an iteration budget N:
// DM1 assumption1: N^{s/(s+a+1)} (both filters); DM1 assumption2:
// N^{2(beta-eps)/(1+2beta+2p)} for the Kalman filter and
// N^{2beta/(1+2eps+2beta+2p)} for 3DVAR; DM2: alpha = 1.
double select_alpha(const RateParams& params, int N, FilterKind kind = FilterKind::kalman);

// N = round(gamma^{-2(a+1)/(a+s+1)}), clamped to >= 1. gamma >= 1 makes the
// budget collapse to a single step; callers surface that as a warning.
int stopping_n_dm2(double gamma, double s, double a);

struct RateExponent {
    double exponent = 0.0;
    bool log_factor = false; // a ln N factor is present but ignored in fits
};

// Exponent of N in the MSE convergence bound for the given combination;
// throws on combinations the theory does not cover.
RateExponent predicted_exponent(const RateParams& params, FilterKind kind);

// Per-step bias^2 / variance / MSE estimates over noise replicates.
struct DecompositionRecord {
    int n = 0;
    double bias_sq = 0.0;
    double variance = 0.0;
    double mse = 0.0;
    double stderr_ = 0.0; // Monte-Carlo standard error of the mse estimate
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // RMS residual of the least-squares line
    int points = 0;
};

// Least-squares line through (ln n, ln mse); needs >= 4 records with
// positive mse.
SlopeFit fit_slope(const std::vector<DecompositionRecord>& records);

struct TheoreticalBounds {
    double bias_bound = 0.0;
    double variance_bound = 0.0;
};

// Bias/variance bound shapes with the generic constant C configurable
// these are bound shapes, not sharp constants.
TheoreticalBounds theoretical_bounds(const RateParams& params, FilterKind kind, int n,
                                     double alpha, double gamma, double trace_sigma0,
                                     double C = 1.0);

// Runs the filter to each N in N_list over M independent (truth, noise)
// replicates of the grid problem in the normalized frame; bias^2 comes from
// a paired noiseless companion run on the same truth, variance from the
// squared distance between the noisy and noiseless means, mse from the
// squared error against the coarse-projected truth.  DM1 resolves alpha via
// select_alpha and uses spec.gamma; DM2 fixes alpha = 1 and couples
// gamma = N^{-(a+s+1)/(2(a+1))} to the stop index.
std::vector<DecompositionRecord> empirical_mse(const ProblemSpec& spec, FilterKind kind,
                                               const std::vector<int>& N_list, int M);

} // namespace invfilter
