#pragma once

#include <vector>

#include "invfilter/grid_field.hpp"
#include "invfilter/spectral_operator.hpp"

namespace invfilter {

enum class FilterKind { kalman, threedvar, variant };

// Regularization schedule alpha_n for the variant iteration; constant
// schedules reduce the variant to the stationary scheme. Geometric
// schedules alpha_n = alpha q^{n-1} with 0 < q < 1 satisfy the
// admissibility condition 1/alpha_n <= (1/q) sigma_{n-1} for n >= 2
// by construction; admissibility is still checked per step.
class AlphaSchedule {
public:
    static AlphaSchedule constant(double alpha);
    static AlphaSchedule geometric(double alpha, double q);

    double alpha_at(int n) const; // n >= 1
    bool geometric_kind() const { return geometric_; }
    double q() const { return q_; }

private:
    AlphaSchedule() = default;
    bool geometric_ = false;
    double alpha_ = 1.0;
    double q_ = 1.0;
};

// State of one filter run in the shared eigenbasis: spectral mean, diagonal
// covariance spectrum, step counter. A value type; steps are pure
// transitions, so independent runs can execute concurrently.
struct FilterState {
    FilterKind kind = FilterKind::kalman;
    GridField mean;                  // spectral representation
    std::vector<double> cov;         // per-mode covariance spectrum
    std::vector<double> sigma0_eig;  // prior spectrum (3dvar / variant gains)
    int step = 0;
    double gamma = 0.0;
    double alpha = 1.0;              // fixed alpha (kalman C0 scale / 3dvar)
    AlphaSchedule schedule = AlphaSchedule::constant(1.0); // variant only
    double sigma_running = 0.0;      // sum of 1/alpha_j, variant only
};

// C0 = (gamma^2/alpha) Sigma0; m0 = 0 unless an explicit start is given.
FilterState make_kalman(const SpectralOperator& Sigma0, const SpectralOperator& A,
                        double alpha, double gamma);
FilterState make_threedvar(const SpectralOperator& Sigma0, const SpectralOperator& A,
                           double alpha, double gamma);
FilterState make_variant(const SpectralOperator& Sigma0, const SpectralOperator& A,
                         AlphaSchedule schedule, double gamma);

// Per-mode Kalman gain k = c kappa / (c kappa^2 + gamma^2); gamma = 0 is
// rejected (noiseless experiments pass a tiny gamma with eta = 0 instead).
std::vector<double> kalman_gain(const std::vector<double>& cov_spectrum,
                                const SpectralOperator& A, double gamma);

// Stationary gain k = lambda kappa / (lambda kappa^2 + alpha).
std::vector<double> threedvar_gain(const SpectralOperator& Sigma0,
                                   const SpectralOperator& A, double alpha);

// The fixed reporting covariance (gamma^2/alpha)(I - KA) Sigma0.
std::vector<double> threedvar_cov(const SpectralOperator& Sigma0,
                                  const SpectralOperator& A, double alpha, double gamma);

FilterState kalman_step(FilterState state, const GridField& y, const SpectralOperator& A);
FilterState threedvar_step(FilterState state, const GridField& y, const SpectralOperator& A);
FilterState variant_step(FilterState state, const GridField& y, const SpectralOperator& A);
// Dispatch on state.kind.
FilterState filter_step(FilterState state, const GridField& y, const SpectralOperator& A);

// Closed form of the precision recursion: per mode
// c_n = (alpha/(gamma^2 lambda) + n kappa^2/gamma^2)^{-1}.
std::vector<double> kalman_cov_closed_form(const SpectralOperator& Sigma0,
                                           const SpectralOperator& A,
                                           double alpha, double gamma, int n);

// prod_{j<=n} (1 - k_j kappa) = alpha / (alpha + n lambda kappa^2) per mode.
std::vector<double> product_operator_spectrum(const SpectralOperator& Sigma0,
                                              const SpectralOperator& A,
                                              double alpha, int n);

// sup over modes of |1 - k kappa|, the contraction factor ||I - KA||.
double contraction_norm(const std::vector<double>& gain_spectrum, const SpectralOperator& A);

struct FilterFunctions {
    double r_one;   // r_{1,alpha/n}(lambda) = alpha/(alpha + n lambda)
    double r_n;     // r_{n,alpha}(lambda)  = (alpha/(alpha+lambda))^n
    double q_n;     // q_{n,alpha}(lambda)  = (1 - r_n)/lambda
};

// Scalar spectral filter functions; also checks the interpolation
// inequality lambda^t r_{1,alpha/n}(lambda) <= (alpha/n)^t for t in [0,1].
FilterFunctions spectral_filter_functions(double lambda, double alpha, int n);

} // namespace invfilter
