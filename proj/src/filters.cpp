#include "invfilter/filters.hpp"

#include <cmath>
#include <stdexcept>

#include "invfilter/kernels.hpp"

namespace invfilter {

AlphaSchedule AlphaSchedule::constant(double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("AlphaSchedule: alpha must be positive");
    AlphaSchedule s;
    s.geometric_ = false;
    s.alpha_ = alpha;
    return s;
}

AlphaSchedule AlphaSchedule::geometric(double alpha, double q) {
    if (alpha <= 0.0) throw std::invalid_argument("AlphaSchedule: alpha must be positive");
    if (q <= 0.0 || q >= 1.0) throw std::invalid_argument("AlphaSchedule: geometric requires 0 < q < 1");
    AlphaSchedule s;
    s.geometric_ = true;
    s.alpha_ = alpha;
    s.q_ = q;
    return s;
}

double AlphaSchedule::alpha_at(int n) const {
    if (n < 1) throw std::invalid_argument("AlphaSchedule: step index starts at 1");
    return geometric_ ? alpha_ * std::pow(q_, n - 1) : alpha_;
}

namespace {

void require_gamma(double gamma) {
    if (gamma <= 0.0)
        throw std::invalid_argument("filters: gamma must be positive (pass a tiny gamma with zero noise for noiseless runs)");
}

GridField spectral_observation(const GridField& y, const Basis2D& b) {
    require_same_basis(y.basis(), b, "filter step");
    return y.in(Repr::spectral);
}

} // namespace

FilterState make_kalman(const SpectralOperator& Sigma0, const SpectralOperator& A,
                        double alpha, double gamma) {
    require_same_basis(Sigma0.basis(), A.basis(), "make_kalman");
    require_gamma(gamma);
    if (alpha <= 0.0) throw std::invalid_argument("make_kalman: alpha must be positive");
    FilterState st;
    st.kind = FilterKind::kalman;
    st.mean = GridField::zeros(A.basis(), Repr::spectral);
    st.cov.resize(Sigma0.eigenvalues().size());
    const double scale = gamma * gamma / alpha;
    for (std::size_t i = 0; i < st.cov.size(); ++i) st.cov[i] = scale * Sigma0.eigenvalue(static_cast<int>(i));
    st.gamma = gamma;
    st.alpha = alpha;
    return st;
}

FilterState make_threedvar(const SpectralOperator& Sigma0, const SpectralOperator& A,
                           double alpha, double gamma) {
    require_same_basis(Sigma0.basis(), A.basis(), "make_threedvar");
    require_gamma(gamma);
    if (alpha <= 0.0) throw std::invalid_argument("make_threedvar: alpha must be positive");
    FilterState st;
    st.kind = FilterKind::threedvar;
    st.mean = GridField::zeros(A.basis(), Repr::spectral);
    st.cov = threedvar_cov(Sigma0, A, alpha, gamma);
    st.gamma = gamma;
    st.alpha = alpha;
    st.sigma0_eig = Sigma0.eigenvalues();
    return st;
}

FilterState make_variant(const SpectralOperator& Sigma0, const SpectralOperator& A,
                         AlphaSchedule schedule, double gamma) {
    require_same_basis(Sigma0.basis(), A.basis(), "make_variant");
    require_gamma(gamma);
    FilterState st;
    st.kind = FilterKind::variant;
    st.mean = GridField::zeros(A.basis(), Repr::spectral);
    st.cov = Sigma0.eigenvalues(); // overwritten by the first step's C_n
    st.gamma = gamma;
    st.schedule = schedule;
    st.sigma0_eig = Sigma0.eigenvalues();
    return st;
}

std::vector<double> kalman_gain(const std::vector<double>& cov_spectrum,
                                const SpectralOperator& A, double gamma) {
    require_gamma(gamma);
    if (cov_spectrum.size() != A.eigenvalues().size())
        throw std::invalid_argument("kalman_gain: spectrum size mismatch");
    const double g2 = gamma * gamma;
    std::vector<double> gain(cov_spectrum.size());
    for (std::size_t i = 0; i < gain.size(); ++i) {
        double c = cov_spectrum[i];
        double kap = A.eigenvalue(static_cast<int>(i));
        gain[i] = c * kap / (c * kap * kap + g2);
    }
    return gain;
}

std::vector<double> threedvar_gain(const SpectralOperator& Sigma0,
                                   const SpectralOperator& A, double alpha) {
    require_same_basis(Sigma0.basis(), A.basis(), "threedvar_gain");
    if (alpha <= 0.0) throw std::invalid_argument("threedvar_gain: alpha must be positive");
    std::vector<double> gain(Sigma0.eigenvalues().size());
    for (std::size_t i = 0; i < gain.size(); ++i) {
        double lam = Sigma0.eigenvalue(static_cast<int>(i));
        double kap = A.eigenvalue(static_cast<int>(i));
        gain[i] = lam * kap / (lam * kap * kap + alpha);
    }
    return gain;
}

std::vector<double> threedvar_cov(const SpectralOperator& Sigma0,
                                  const SpectralOperator& A, double alpha, double gamma) {
    std::vector<double> gain = threedvar_gain(Sigma0, A, alpha);
    std::vector<double> cov(gain.size());
    const double scale = gamma * gamma / alpha;
    for (std::size_t i = 0; i < cov.size(); ++i) {
        double kap = A.eigenvalue(static_cast<int>(i));
        cov[i] = scale * (1.0 - gain[i] * kap) * Sigma0.eigenvalue(static_cast<int>(i));
    }
    return cov;
}

FilterState kalman_step(FilterState state, const GridField& y, const SpectralOperator& A) {
    if (state.kind != FilterKind::kalman) throw std::invalid_argument("kalman_step: wrong state kind");
    GridField ys = spectral_observation(y, state.mean.basis());
    kernels::kalman_sweep(state.cov.size(), A.eigenvalues().data(), ys.data().data(),
                          state.gamma * state.gamma, state.mean.mutable_data().data(),
                          state.cov.data());
    ++state.step;
    return state;
}

FilterState threedvar_step(FilterState state, const GridField& y, const SpectralOperator& A) {
    if (state.kind != FilterKind::threedvar) throw std::invalid_argument("threedvar_step: wrong state kind");
    GridField ys = spectral_observation(y, state.mean.basis());
    kernels::stationary_sweep(state.sigma0_eig.size(), A.eigenvalues().data(),
                              state.sigma0_eig.data(), ys.data().data(), state.alpha,
                              state.mean.mutable_data().data());
    ++state.step;
    return state;
}

FilterState variant_step(FilterState state, const GridField& y, const SpectralOperator& A) {
    if (state.kind != FilterKind::variant) throw std::invalid_argument("variant_step: wrong state kind");
    const int n = state.step + 1;
    const double alpha_n = state.schedule.alpha_at(n);
    if (n >= 2) {
        // Admissibility 1/alpha_n <= c~ sigma_{n-1} with c~ = 1/q for the
        // geometric schedule (equality holds in the limit q -> 1).
        double ctilde = state.schedule.geometric_kind() ? 1.0 / state.schedule.q() : 1.0;
        if (1.0 / alpha_n > ctilde * state.sigma_running * (1.0 + 1e-12))
            throw std::domain_error("variant_step: schedule violates 1/alpha_n <= c~ sigma_{n-1}");
    }
    GridField ys = spectral_observation(y, state.mean.basis());
    kernels::stationary_sweep(state.sigma0_eig.size(), A.eigenvalues().data(),
                              state.sigma0_eig.data(), ys.data().data(), alpha_n,
                              state.mean.mutable_data().data());
    // C_n = (gamma^2/alpha_n)(I - K_n A) Sigma0 per mode.
    const double scale = state.gamma * state.gamma / alpha_n;
    for (std::size_t i = 0; i < state.cov.size(); ++i) {
        double lam = state.sigma0_eig[i];
        double kap = A.eigenvalue(static_cast<int>(i));
        double k = lam * kap / (lam * kap * kap + alpha_n);
        state.cov[i] = scale * (1.0 - k * kap) * lam;
    }
    state.sigma_running += 1.0 / alpha_n;
    ++state.step;
    return state;
}

FilterState filter_step(FilterState state, const GridField& y, const SpectralOperator& A) {
    switch (state.kind) {
        case FilterKind::kalman: return kalman_step(std::move(state), y, A);
        case FilterKind::threedvar: return threedvar_step(std::move(state), y, A);
        case FilterKind::variant: return variant_step(std::move(state), y, A);
    }
    throw std::logic_error("filter_step: unknown kind");
}

std::vector<double> kalman_cov_closed_form(const SpectralOperator& Sigma0,
                                           const SpectralOperator& A,
                                           double alpha, double gamma, int n) {
    require_same_basis(Sigma0.basis(), A.basis(), "kalman_cov_closed_form");
    if (n < 0) throw std::invalid_argument("kalman_cov_closed_form: n must be >= 0");
    const double g2 = gamma * gamma;
    std::vector<double> cov(Sigma0.eigenvalues().size());
    for (std::size_t i = 0; i < cov.size(); ++i) {
        double lam = Sigma0.eigenvalue(static_cast<int>(i));
        double kap = A.eigenvalue(static_cast<int>(i));
        cov[i] = 1.0 / (alpha / (g2 * lam) + n * kap * kap / g2);
    }
    return cov;
}

std::vector<double> product_operator_spectrum(const SpectralOperator& Sigma0,
                                              const SpectralOperator& A,
                                              double alpha, int n) {
    require_same_basis(Sigma0.basis(), A.basis(), "product_operator_spectrum");
    if (n < 1) throw std::invalid_argument("product_operator_spectrum: n must be >= 1");
    std::vector<double> f(Sigma0.eigenvalues().size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        double lam = Sigma0.eigenvalue(static_cast<int>(i));
        double kap = A.eigenvalue(static_cast<int>(i));
        f[i] = alpha / (alpha + n * lam * kap * kap);
    }
    return f;
}

double contraction_norm(const std::vector<double>& gain_spectrum, const SpectralOperator& A) {
    if (gain_spectrum.size() != A.eigenvalues().size())
        throw std::invalid_argument("contraction_norm: spectrum size mismatch");
    double sup = 0.0;
    for (std::size_t i = 0; i < gain_spectrum.size(); ++i) {
        double v = std::abs(1.0 - gain_spectrum[i] * A.eigenvalue(static_cast<int>(i)));
        sup = std::max(sup, v);
    }
    return sup;
}

FilterFunctions spectral_filter_functions(double lambda, double alpha, int n) {
    if (lambda <= 0.0 || alpha <= 0.0 || n < 1)
        throw std::invalid_argument("spectral_filter_functions: requires lambda > 0, alpha > 0, n >= 1");
    FilterFunctions f;
    f.r_one = alpha / (alpha + n * lambda);
    f.r_n = std::pow(alpha / (alpha + lambda), n);
    f.q_n = (1.0 - f.r_n) / lambda;
    // Interpolation inequality lambda^t r_{1,alpha/n} <= (alpha/n)^t.
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        double lhs = std::pow(lambda, t) * f.r_one;
        double rhs = std::pow(alpha / n, t);
        if (lhs > rhs * (1.0 + 1e-12))
            throw std::logic_error("spectral_filter_functions: interpolation inequality violated");
    }
    return f;
}

} // namespace invfilter
