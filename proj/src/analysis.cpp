#include "invfilter/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "invfilter/frame.hpp"

namespace invfilter {

double select_alpha(const RateParams& params, int N, FilterKind kind) {
    if (N < 1) throw std::invalid_argument("select_alpha: N must be >= 1");
    if (params.data_model == DataModel::dm2) return 1.0;
    const double n = static_cast<double>(N);
    if (params.regime == Regime::assumption1)
        return std::pow(n, params.s / (params.s + params.a + 1.0));
    if (kind == FilterKind::threedvar)
        return std::pow(n, 2.0 * params.beta /
                               (1.0 + 2.0 * params.eps + 2.0 * params.beta + 2.0 * params.p));
    return std::pow(n, 2.0 * (params.beta - params.eps) /
                           (1.0 + 2.0 * params.beta + 2.0 * params.p));
}

int stopping_n_dm2(double gamma, double s, double a) {
    if (gamma <= 0.0) throw std::invalid_argument("stopping_n_dm2: gamma must be positive");
    double N = std::round(std::pow(gamma, -2.0 * (a + 1.0) / (a + s + 1.0)));
    return std::max(1, static_cast<int>(N));
}

RateExponent predicted_exponent(const RateParams& params, FilterKind kind) {
    const bool a1 = params.regime == Regime::assumption1;
    const bool dm1 = params.data_model == DataModel::dm1;
    if (kind == FilterKind::kalman) {
        if (dm1 && a1) return {-params.s / (params.s + params.a + 1.0), false};
        if (dm1) return {-2.0 * params.beta / (1.0 + 2.0 * params.beta + 2.0 * params.p), false};
        if (a1) return {-params.s / (params.a + 1.0), false};
        return {-2.0 * params.beta / (1.0 + 2.0 * params.eps + 2.0 * params.p), false};
    }
    if (kind == FilterKind::threedvar) {
        if (dm1 && a1) return {-params.s / (params.s + params.a + 1.0), true};
        if (dm1)
            return {-2.0 * params.beta /
                        (1.0 + 2.0 * params.eps + 2.0 * params.beta + 2.0 * params.p),
                    true};
        if (a1) return {-params.s / (params.a + 1.0), false};
    }
    throw std::invalid_argument("predicted_exponent: combination not covered by the theory");
}

SlopeFit fit_slope(const std::vector<DecompositionRecord>& records) {
    if (records.size() < 4) throw std::invalid_argument("fit_slope: need at least 4 records");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : records) {
        if (!(r.mse > 0.0)) throw std::domain_error("fit_slope: nonpositive mse");
        double x = std::log(static_cast<double>(r.n));
        double y = std::log(r.mse);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(records.size());
    double denom = m * sxx - sx * sx;
    SlopeFit fit;
    fit.points = static_cast<int>(records.size());
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    double rss = 0.0;
    for (const auto& r : records) {
        double x = std::log(static_cast<double>(r.n));
        double e = std::log(r.mse) - (fit.intercept + fit.slope * x);
        rss += e * e;
    }
    fit.residual = std::sqrt(rss / m);
    return fit;
}

TheoreticalBounds theoretical_bounds(const RateParams& params, FilterKind kind, int n,
                                     double alpha, double gamma, double trace_sigma0,
                                     double C) {
    if (n < 1) throw std::invalid_argument("theoretical_bounds: n must be >= 1");
    const bool a1 = params.regime == Regime::assumption1;
    const bool dm1 = params.data_model == DataModel::dm1;
    const double g2 = gamma * gamma;
    TheoreticalBounds b;
    b.bias_bound = a1 ? C * std::pow(alpha / n, params.s / (params.a + 1.0))
                      : C * std::pow(alpha / n, 2.0 * params.beta /
                                                    (1.0 + 2.0 * params.eps + 2.0 * params.p));
    if (kind == FilterKind::kalman) {
        if (dm1)
            b.variance_bound =
                a1 ? g2 / alpha * trace_sigma0
                   : g2 * std::pow(n, -2.0 * params.eps / (1.0 + 2.0 * params.eps + 2.0 * params.p)) *
                         std::pow(alpha, -(1.0 + 2.0 * params.p) /
                                             (1.0 + 2.0 * params.eps + 2.0 * params.p));
        else
            b.variance_bound =
                a1 ? n * g2 / alpha * trace_sigma0
                   : g2 * std::pow(n / alpha, (1.0 + 2.0 * params.p) /
                                                  (1.0 + 2.0 * params.eps + 2.0 * params.p));
    } else if (kind == FilterKind::threedvar) {
        if (dm1)
            b.variance_bound =
                a1 ? C * g2 * std::log(std::max(2.0, static_cast<double>(n))) / alpha * trace_sigma0
                   : C * g2 * std::pow(alpha, -(1.0 + 2.0 * params.p) /
                                                  (1.0 + 2.0 * params.eps + 2.0 * params.p));
        else if (a1)
            b.variance_bound = n * g2 / alpha * trace_sigma0;
        else
            throw std::invalid_argument("theoretical_bounds: combination not covered");
    } else {
        throw std::invalid_argument("theoretical_bounds: variant has no per-step bound here");
    }
    return b;
}

namespace {

struct ReplicateResult {
    double mse = 0.0;
    double bias_sq = 0.0;
    double variance = 0.0;
};

double sq_norm_diff(const GridField& a, const GridField& b) {
    double acc = 0.0;
    auto da = a.data(), db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        double d = da[i] - db[i];
        acc += d * d;
    }
    return acc;
}

} // namespace

std::vector<DecompositionRecord> empirical_mse(const ProblemSpec& spec, FilterKind kind,
                                               const std::vector<int>& N_list, int M) {
    if (M < 2) throw std::invalid_argument("empirical_mse: need at least 2 replicates");
    if (kind == FilterKind::variant)
        throw std::invalid_argument("empirical_mse: rate studies cover kalman and threedvar");
    NormalizedProblem frame = make_frame(spec);
    RateParams params = RateParams::assumption1(spec.s, spec.a, spec.data_model);
    const int maxN = *std::max_element(N_list.begin(), N_list.end());
    const bool dm1 = spec.data_model == DataModel::dm1;

    std::vector<std::vector<ReplicateResult>> per_rep(
        static_cast<std::size_t>(M), std::vector<ReplicateResult>(N_list.size()));

#ifdef INVFILTER_OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (kernels::parallel_enabled())
#endif
    for (int rep = 0; rep < M; ++rep) {
        ProblemSpec rspec = spec;
        rspec.seed = mix_seed(spec.seed, 0x726570ULL + static_cast<std::uint64_t>(rep));
        TruthSample truth = sample_truth_normalized(rspec, frame);
        const GridField target = truth.coarse_projection.to_spectral();
        GridField noise_free = frame.A_fine.apply(truth.fine_field).in(Repr::nodal);

        if (dm1) {
            double gamma = spec.gamma.value_or(5e-4);
            DataStream stream(DataModel::dm1, noise_free, spec.coarse_n, gamma,
                              mix_seed(rspec.seed, 0x64617461ULL));
            // Pre-pull the observation sequence once per replicate; it is
            // shared across every N (same synthetic data for all budgets).
            std::vector<GridField> obs;
            obs.reserve(maxN);
            for (int i = 1; i <= maxN; ++i) obs.push_back(stream.observation(i));
            const GridField& clean_y = stream.noise_free_coarse();

            for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
                const int N = N_list[ni];
                double alpha = select_alpha(params, N, kind);
                FilterState noisy = kind == FilterKind::kalman
                                        ? make_kalman(frame.Sigma0_coarse, frame.A_coarse, alpha, gamma)
                                        : make_threedvar(frame.Sigma0_coarse, frame.A_coarse, alpha, gamma);
                FilterState clean = noisy;
                for (int n = 0; n < N; ++n) {
                    noisy = filter_step(std::move(noisy), obs[n], frame.A_coarse);
                    clean = filter_step(std::move(clean), clean_y, frame.A_coarse);
                }
                ReplicateResult r;
                r.mse = sq_norm_diff(noisy.mean, target);
                r.bias_sq = sq_norm_diff(clean.mean, target);
                r.variance = sq_norm_diff(noisy.mean, clean.mean);
                per_rep[rep][ni] = r;
            }
        } else {
            for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
                const int N = N_list[ni];
                // DM2 rate protocol: the noise level is defined through the
                // stop index, gamma = N^{-(a+s+1)/(2(a+1))}.
                double gamma = spec.gamma.value_or(
                    std::pow(static_cast<double>(N), -(spec.a + spec.s + 1.0) / (2.0 * (spec.a + 1.0))));
                DataStream stream(DataModel::dm2, noise_free, spec.coarse_n, gamma,
                                  mix_seed(rspec.seed, 0x64617461ULL + 131 * static_cast<std::uint64_t>(N)));
                GridField y = stream.observation(1);
                const GridField& clean_y = stream.noise_free_coarse();
                double alpha = 1.0;
                FilterState noisy = kind == FilterKind::kalman
                                        ? make_kalman(frame.Sigma0_coarse, frame.A_coarse, alpha, gamma)
                                        : make_threedvar(frame.Sigma0_coarse, frame.A_coarse, alpha, gamma);
                FilterState clean = noisy;
                for (int n = 0; n < N; ++n) {
                    noisy = filter_step(std::move(noisy), y, frame.A_coarse);
                    clean = filter_step(std::move(clean), clean_y, frame.A_coarse);
                }
                ReplicateResult r;
                r.mse = sq_norm_diff(noisy.mean, target);
                r.bias_sq = sq_norm_diff(clean.mean, target);
                r.variance = sq_norm_diff(noisy.mean, clean.mean);
                per_rep[rep][ni] = r;
            }
        }
    }

    std::vector<DecompositionRecord> out(N_list.size());
    for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
        DecompositionRecord rec;
        rec.n = N_list[ni];
        double sum = 0.0, sumsq = 0.0;
        for (int rep = 0; rep < M; ++rep) {
            const auto& r = per_rep[rep][ni];
            rec.bias_sq += r.bias_sq;
            rec.variance += r.variance;
            sum += r.mse;
            sumsq += r.mse * r.mse;
        }
        const double m = static_cast<double>(M);
        rec.bias_sq /= m;
        rec.variance /= m;
        rec.mse = sum / m;
        rec.stderr_ = std::sqrt(std::max(0.0, sumsq / m - rec.mse * rec.mse) / m);
        if (!std::isfinite(rec.mse)) throw std::runtime_error("empirical_mse: non-finite mse");
        out[ni] = rec;
    }
    return out;
}

} // namespace invfilter
