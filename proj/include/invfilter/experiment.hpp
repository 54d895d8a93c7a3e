#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "invfilter/analysis.hpp"
#include "invfilter/frame.hpp"

namespace invfilter {

// Named experiment runners shared by the CLI and the acceptance suite.

struct TrajectoryPoint {
    int n = 0;
    double error = 0.0; // sqrt(mse)
    double bias_sq = 0.0;
    double variance = 0.0;
    double mse = 0.0;
    double stderr_ = 0.0;
};

struct TrajectoryResult {
    std::vector<TrajectoryPoint> points;
    double gamma = 0.0;
    double alpha = 0.0;
    int stopping_n = 0; // Algorithm-style DM2 stop index (0 for DM1)
};

// Per-step error trajectory against the coarse-projected truth, aggregated
// over `replicates` independent (truth, noise) draws with a paired
// noiseless companion run per replicate.
TrajectoryResult single_run(const ProblemSpec& spec, FilterKind kind, int steps, int replicates);

struct RateStudyResult {
    FilterKind kind = FilterKind::kalman;
    double s = 1.0;
    std::vector<DecompositionRecord> records;
    SlopeFit fit;
    RateExponent predicted;
};

std::vector<RateStudyResult> rate_study(const ProblemSpec& base,
                                        const std::vector<double>& s_values,
                                        const std::vector<int>& N_list, int M,
                                        const std::vector<FilterKind>& kinds);

// Diagonal sequence model: Sigma0 eigenvalues lambda_i, singular values
// kappa_i, truth coefficient std per mode.
struct DiagonalModel {
    std::vector<double> lambda;
    std::vector<double> kappa;
    std::vector<double> truth_std;
};

// lambda_i = i^{-1-2eps}, kappa_i = i^{-p}, truth std_i = i^{-beta-1/2}
// (the boundary of the beta-smoothness class).
DiagonalModel make_sequence_model(int modes, double beta, double eps, double p);

struct DiagonalStudyResult {
    std::vector<DecompositionRecord> records;
    SlopeFit fit;
    double predicted_exponent = 0.0;
};

// Kalman/DM1 minimax study on the sequence model (fresh truth and fresh
// per-step noise each replicate), alpha = N^{2(beta-eps)/(1+2beta+2p)}.
DiagonalStudyResult diagonal_minimax_study(const DiagonalModel& model,
                                           double beta, double eps, double p,
                                           const std::vector<int>& N_list, int M,
                                           double gamma, std::uint64_t seed);

// Variant-3DVAR blow-up run on a diagonal model with a geometric schedule;
// returns the replicate-averaged MSE trajectory.
TrajectoryResult variant_blowup(const DiagonalModel& model, double alpha, double q,
                                double gamma, int steps, int M, std::uint64_t seed);

// ||I - KA|| for the experiment operators (normalized frame, stationary
// gain at the given alpha) across grid sizes.
std::vector<std::pair<int, double>> contraction_diagnostic(const std::vector<int>& grid_sizes,
                                                           double alpha);

struct CltStudyResult {
    std::vector<std::pair<int, double>> variance_vs_n; // (n, mean coeff variance of y-bar)
    double slope = 0.0;                                // log-log fitted decay
};

// Empirical variance of averaged-observation coefficients versus the
// averaging count; documents the gamma^2/n scaling.
CltStudyResult clt_averaging_study(const ProblemSpec& spec, const std::vector<int>& n_values,
                                   int replicates, int probe_modes);

// Condensed oracle checks (closed forms vs iterated filters, transform
// invariants, filter-function identities); logs one line per check.
bool run_oracle_suite(std::ostream& log);

// DM2 stop index derived from the problem's frame-units noise level.
int derived_stopping_n(const ProblemSpec& spec);

// gamma realizing a DM2 stop index N under (s, a):
// gamma = N^{-(a+s+1)/(2(a+1))}.
double gamma_for_stop_index(int N, double s, double a);

} // namespace invfilter
