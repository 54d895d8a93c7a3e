#include "invfilter/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "invfilter/kernels.hpp"
#include "invfilter/rng.hpp"

namespace invfilter {

namespace {

double sq_norm_diff(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

struct Welford {
    double mean = 0.0, m2 = 0.0;
    long count = 0;
    void add(double x) {
        ++count;
        double d = x - mean;
        mean += d / count;
        m2 += d * (x - mean);
    }
    double variance() const { return count > 1 ? m2 / (count - 1) : 0.0; }
};

} // namespace

double gamma_for_stop_index(int N, double s, double a) {
    if (N < 1) throw std::invalid_argument("gamma_for_stop_index: N must be >= 1");
    return std::pow(static_cast<double>(N), -(a + s + 1.0) / (2.0 * (a + 1.0)));
}

int derived_stopping_n(const ProblemSpec& spec) {
    NormalizedProblem frame = make_frame(spec);
    ProblemSpec tspec = spec;
    TruthSample truth = sample_truth_normalized(tspec, frame);
    double gamma = resolve_gamma(spec, frame, truth);
    return stopping_n_dm2(gamma, spec.s, spec.a);
}

TrajectoryResult single_run(const ProblemSpec& spec, FilterKind kind, int steps, int replicates) {
    if (steps < 1 || replicates < 1) throw std::invalid_argument("single_run: steps and replicates must be >= 1");
    NormalizedProblem frame = make_frame(spec);

    // Resolve gamma and the stop bookkeeping on a reference truth draw.
    TrajectoryResult result;
    {
        TruthSample ref = sample_truth_normalized(spec, frame);
        result.gamma = resolve_gamma(spec, frame, ref);
    }
    const double gamma = result.gamma;
    if (spec.data_model == DataModel::dm2)
        result.stopping_n = stopping_n_dm2(gamma, spec.s, spec.a);

    const int budget = spec.data_model == DataModel::dm1 ? spec.budget_n
                                                         : std::max(1, result.stopping_n);
    double alpha;
    switch (spec.alpha_rule.kind) {
        case AlphaRule::Kind::from_budget:
            alpha = spec.data_model == DataModel::dm1
                        ? select_alpha(RateParams::assumption1(spec.s, spec.a, spec.data_model), budget, kind)
                        : 1.0;
            break;
        case AlphaRule::Kind::fixed:
        case AlphaRule::Kind::variant_geometric:
            alpha = spec.alpha_rule.alpha;
            break;
        default:
            throw std::logic_error("single_run: unknown alpha rule");
    }
    result.alpha = alpha;

    std::vector<std::vector<double>> mse(static_cast<std::size_t>(replicates)),
        bias(static_cast<std::size_t>(replicates)), var(static_cast<std::size_t>(replicates));

#ifdef INVFILTER_OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (kernels::parallel_enabled())
#endif
    for (int rep = 0; rep < replicates; ++rep) {
        ProblemSpec rspec = spec;
        rspec.seed = mix_seed(spec.seed, 0x726570ULL + static_cast<std::uint64_t>(rep));
        TruthSample truth = sample_truth_normalized(rspec, frame);
        GridField target = truth.coarse_projection.to_spectral();
        GridField noise_free = frame.A_fine.apply(truth.fine_field).in(Repr::nodal);
        DataStream stream(spec.data_model, noise_free, spec.coarse_n, gamma,
                          mix_seed(rspec.seed, 0x64617461ULL));
        const GridField& clean_y = stream.noise_free_coarse();

        auto make_state = [&](FilterKind k) {
            switch (k) {
                case FilterKind::kalman: return make_kalman(frame.Sigma0_coarse, frame.A_coarse, alpha, gamma);
                case FilterKind::threedvar: return make_threedvar(frame.Sigma0_coarse, frame.A_coarse, alpha, gamma);
                case FilterKind::variant:
                    return make_variant(frame.Sigma0_coarse, frame.A_coarse,
                                        AlphaSchedule::geometric(spec.alpha_rule.alpha, spec.alpha_rule.q), gamma);
            }
            throw std::logic_error("single_run: unknown filter kind");
        };
        FilterState noisy = make_state(kind);
        FilterState clean = make_state(kind);

        auto& mrow = mse[rep];
        auto& brow = bias[rep];
        auto& vrow = var[rep];
        mrow.resize(steps);
        brow.resize(steps);
        vrow.resize(steps);
        for (int n = 1; n <= steps; ++n) {
            noisy = filter_step(std::move(noisy), stream.observation(n), frame.A_coarse);
            clean = filter_step(std::move(clean), clean_y, frame.A_coarse);
            mrow[n - 1] = sq_norm_diff(noisy.mean.data(), target.data());
            brow[n - 1] = sq_norm_diff(clean.mean.data(), target.data());
            vrow[n - 1] = sq_norm_diff(noisy.mean.data(), clean.mean.data());
            for (double c : noisy.cov)
                if (!(c > 0.0) || !std::isfinite(c))
                    throw std::runtime_error("single_run: covariance left the positive cone");
        }
    }

    result.points.resize(steps);
    for (int n = 0; n < steps; ++n) {
        Welford w;
        TrajectoryPoint p;
        p.n = n + 1;
        for (int rep = 0; rep < replicates; ++rep) {
            p.bias_sq += bias[rep][n];
            p.variance += var[rep][n];
            w.add(mse[rep][n]);
        }
        p.bias_sq /= replicates;
        p.variance /= replicates;
        p.mse = w.mean;
        p.error = std::sqrt(p.mse);
        p.stderr_ = replicates > 1 ? std::sqrt(w.variance() / replicates) : 0.0;
        if (!std::isfinite(p.mse)) throw std::runtime_error("single_run: non-finite error");
        result.points[n] = p;
    }
    return result;
}

std::vector<RateStudyResult> rate_study(const ProblemSpec& base,
                                        const std::vector<double>& s_values,
                                        const std::vector<int>& N_list, int M,
                                        const std::vector<FilterKind>& kinds) {
    std::vector<RateStudyResult> out;
    for (double s : s_values) {
        ProblemSpec spec = base;
        spec.s = s;
        spec.seed = mix_seed(base.seed, static_cast<std::uint64_t>(s * 1000.0));
        for (FilterKind kind : kinds) {
            RateStudyResult r;
            r.kind = kind;
            r.s = s;
            r.records = empirical_mse(spec, kind, N_list, M);
            r.fit = fit_slope(r.records);
            r.predicted = predicted_exponent(RateParams::assumption1(s, spec.a, spec.data_model), kind);
            out.push_back(std::move(r));
        }
    }
    return out;
}

DiagonalModel make_sequence_model(int modes, double beta, double eps, double p) {
    DiagonalModel m;
    m.lambda.resize(modes);
    m.kappa.resize(modes);
    m.truth_std.resize(modes);
    for (int i = 1; i <= modes; ++i) {
        double x = static_cast<double>(i);
        m.lambda[i - 1] = std::pow(x, -1.0 - 2.0 * eps);
        m.kappa[i - 1] = std::pow(x, -p);
        m.truth_std[i - 1] = std::pow(x, -beta - 0.5);
    }
    return m;
}

DiagonalStudyResult diagonal_minimax_study(const DiagonalModel& model,
                                           double beta, double eps, double p,
                                           const std::vector<int>& N_list, int M,
                                           double gamma, std::uint64_t seed) {
    const std::size_t modes = model.lambda.size();
    RateParams params = RateParams::assumption2(beta, eps, p, DataModel::dm1);
    DiagonalStudyResult out;
    out.predicted_exponent = predicted_exponent(params, FilterKind::kalman).exponent;

    std::vector<std::vector<double>> mse_rep(static_cast<std::size_t>(M),
                                             std::vector<double>(N_list.size(), 0.0));
#ifdef INVFILTER_OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (kernels::parallel_enabled())
#endif
    for (int rep = 0; rep < M; ++rep) {
        Rng truth_rng(mix_seed(seed, 0x7472757468ULL + static_cast<std::uint64_t>(rep)));
        std::vector<double> u(modes);
        for (std::size_t i = 0; i < modes; ++i) u[i] = model.truth_std[i] * truth_rng.next_normal();
        std::vector<double> clean_y(modes);
        for (std::size_t i = 0; i < modes; ++i) clean_y[i] = model.kappa[i] * u[i];

        for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
            const int N = N_list[ni];
            const double alpha = select_alpha(params, N, FilterKind::kalman);
            std::vector<double> mean(modes, 0.0), cov(modes), y(modes);
            const double g2 = gamma * gamma;
            for (std::size_t i = 0; i < modes; ++i) cov[i] = g2 / alpha * model.lambda[i];
            Rng noise_rng(mix_seed(seed, 0x6e6f697365ULL +
                                             1009 * static_cast<std::uint64_t>(rep) +
                                             static_cast<std::uint64_t>(N)));
            for (int n = 0; n < N; ++n) {
                for (std::size_t i = 0; i < modes; ++i)
                    y[i] = clean_y[i] + gamma * noise_rng.next_normal();
                kernels::kalman_sweep(modes, model.kappa.data(), y.data(), g2, mean.data(), cov.data());
            }
            mse_rep[rep][ni] = sq_norm_diff(mean, u);
        }
    }
    out.records.resize(N_list.size());
    for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
        Welford w;
        for (int rep = 0; rep < M; ++rep) w.add(mse_rep[rep][ni]);
        DecompositionRecord rec;
        rec.n = N_list[ni];
        rec.mse = w.mean;
        rec.stderr_ = std::sqrt(w.variance() / M);
        out.records[ni] = rec;
    }
    out.fit = fit_slope(out.records);
    return out;
}

TrajectoryResult variant_blowup(const DiagonalModel& model, double alpha, double q,
                                double gamma, int steps, int M, std::uint64_t seed) {
    const std::size_t modes = model.lambda.size();
    AlphaSchedule schedule = AlphaSchedule::geometric(alpha, q);
    std::vector<std::vector<double>> mse_rep(static_cast<std::size_t>(M),
                                             std::vector<double>(steps, 0.0));
#ifdef INVFILTER_OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (kernels::parallel_enabled())
#endif
    for (int rep = 0; rep < M; ++rep) {
        Rng truth_rng(mix_seed(seed, 0x7472757468ULL + static_cast<std::uint64_t>(rep)));
        std::vector<double> u(modes), mean(modes, 0.0), y(modes);
        for (std::size_t i = 0; i < modes; ++i) u[i] = model.truth_std[i] * truth_rng.next_normal();
        Rng noise_rng(mix_seed(seed, 0x6e6f697365ULL + static_cast<std::uint64_t>(rep)));
        double sigma_running = 0.0;
        for (int n = 1; n <= steps; ++n) {
            const double alpha_n = schedule.alpha_at(n);
            if (n >= 2 && 1.0 / alpha_n > (1.0 / q) * sigma_running * (1.0 + 1e-12))
                throw std::domain_error("variant_blowup: inadmissible schedule");
            for (std::size_t i = 0; i < modes; ++i)
                y[i] = model.kappa[i] * u[i] + gamma * noise_rng.next_normal();
            kernels::stationary_sweep(modes, model.kappa.data(), model.lambda.data(), y.data(),
                                      alpha_n, mean.data());
            sigma_running += 1.0 / alpha_n;
            mse_rep[rep][n - 1] = sq_norm_diff(mean, u);
        }
    }
    TrajectoryResult out;
    out.gamma = gamma;
    out.alpha = alpha;
    out.points.resize(steps);
    for (int n = 0; n < steps; ++n) {
        Welford w;
        for (int rep = 0; rep < M; ++rep) w.add(mse_rep[rep][n]);
        TrajectoryPoint p;
        p.n = n + 1;
        p.mse = w.mean;
        p.error = std::sqrt(p.mse);
        p.stderr_ = std::sqrt(w.variance() / M);
        out.points[n] = p;
    }
    return out;
}

std::vector<std::pair<int, double>> contraction_diagnostic(const std::vector<int>& grid_sizes,
                                                           double alpha) {
    std::vector<std::pair<int, double>> out;
    for (int n : grid_sizes) {
        ProblemSpec spec;
        spec.coarse_n = n;
        spec.fine_n = 2 * n;
        NormalizedProblem frame = make_frame(spec);
        auto gain = threedvar_gain(frame.Sigma0_coarse, frame.A_coarse, alpha);
        out.emplace_back(n, contraction_norm(gain, frame.A_coarse));
    }
    return out;
}

CltStudyResult clt_averaging_study(const ProblemSpec& spec, const std::vector<int>& n_values,
                                   int replicates, int probe_modes) {
    NormalizedProblem frame = make_frame(spec);
    TruthSample truth = sample_truth_normalized(spec, frame);
    double gamma = resolve_gamma(spec, frame, truth);
    GridField noise_free = frame.A_fine.apply(truth.fine_field).in(Repr::nodal);

    const int probes = std::min(probe_modes, frame.coarse.mode_count());
    CltStudyResult out;
    std::vector<std::vector<Welford>> acc(n_values.size(), std::vector<Welford>(probes));
    for (int rep = 0; rep < replicates; ++rep) {
        DataStream stream(DataModel::dm1, noise_free, spec.coarse_n, gamma,
                          mix_seed(spec.seed, 0x636c74ULL + static_cast<std::uint64_t>(rep)));
        for (std::size_t vi = 0; vi < n_values.size(); ++vi) {
            AveragedObservation avg = average_observations(stream, n_values[vi]);
            for (int m = 0; m < probes; ++m) acc[vi][m].add(avg.mean.data()[m]);
        }
    }
    std::vector<DecompositionRecord> fitrec;
    for (std::size_t vi = 0; vi < n_values.size(); ++vi) {
        double mean_var = 0.0;
        for (int m = 0; m < probes; ++m) mean_var += acc[vi][m].variance();
        mean_var /= probes;
        out.variance_vs_n.emplace_back(n_values[vi], mean_var);
        DecompositionRecord r;
        r.n = n_values[vi];
        r.mse = mean_var;
        fitrec.push_back(r);
    }
    out.slope = fit_slope(fitrec).slope;
    return out;
}

bool run_oracle_suite(std::ostream& log) {
    bool ok = true;
    auto check = [&](bool pass, const char* name, double measured, double bound) {
        log << (pass ? "  ok   " : "  FAIL ") << name << " (measured " << measured
            << ", bound " << bound << ")\n";
        ok = ok && pass;
    };

    // Closed forms against the iterated filter on random diagonal problems.
    {
        Rng rng(20240901);
        double worst_cov = 0.0, worst_prod = 0.0;
        for (int trial = 0; trial < 25; ++trial) {
            int modes = 16 + static_cast<int>(rng.next_double() * 200);
            std::vector<double> lam(modes), kap(modes), mean(modes, 0.0), cov(modes);
            double alpha = std::exp(rng.next_double() * 4.0 - 2.0);
            double gamma = std::exp(rng.next_double() * 3.0 - 2.0);
            for (int i = 0; i < modes; ++i) {
                lam[i] = std::exp(-rng.next_double() * 8.0);
                kap[i] = std::exp(-rng.next_double() * 4.0);
            }
            int steps = 1 + static_cast<int>(rng.next_double() * 120);
            const double g2 = gamma * gamma;
            std::vector<double> prod(modes, 1.0), y(modes, 0.0);
            for (int i = 0; i < modes; ++i) cov[i] = g2 / alpha * lam[i];
            for (int n = 0; n < steps; ++n) {
                for (int i = 0; i < modes; ++i) {
                    double k = cov[i] * kap[i] / (cov[i] * kap[i] * kap[i] + g2);
                    prod[i] *= 1.0 - k * kap[i];
                }
                kernels::kalman_sweep(static_cast<std::size_t>(modes), kap.data(), y.data(), g2,
                                      mean.data(), cov.data());
            }
            for (int i = 0; i < modes; ++i) {
                double cf = 1.0 / (alpha / (g2 * lam[i]) + steps * kap[i] * kap[i] / g2);
                double pf = alpha / (alpha + steps * lam[i] * kap[i] * kap[i]);
                worst_cov = std::max(worst_cov, std::abs(cov[i] - cf) / cf);
                worst_prod = std::max(worst_prod, std::abs(prod[i] - pf) / pf);
            }
        }
        check(worst_cov <= 1e-10, "kalman covariance closed form", worst_cov, 1e-10);
        check(worst_prod <= 1e-10, "homogeneous contraction closed form", worst_prod, 1e-10);
    }

    // Transform invariants.
    {
        Rng rng(20240902);
        double worst_rt = 0.0, worst_pars = 0.0, worst_link = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            int n = trial % 2 == 0 ? 24 : 40;
            Basis2D b(n);
            std::vector<double> vals(b.nodal_size());
            for (auto& v : vals) v = rng.next_normal();
            GridField f = GridField::nodal(b, vals);
            GridField fs = f.to_spectral();
            GridField back = fs.to_nodal();
            // Compare against the mean-removed original.
            double mean = f.mean();
            double diff = 0.0, ref = 0.0;
            for (int i = 0; i < b.nodal_size(); ++i) {
                double want = vals[i] - mean;
                diff += (back.data()[i] - want) * (back.data()[i] - want);
                ref += want * want;
            }
            worst_rt = std::max(worst_rt, std::sqrt(diff / ref));
            worst_pars = std::max(worst_pars, std::abs(fs.norm() - back.norm()) / fs.norm());
            SpectralOperator A = SpectralOperator::neumann_laplacian_inverse(b);
            SpectralOperator S0 = A.pow(2.0);
            double na = A.apply(fs).norm();
            double ns = S0.pow(0.5).apply(fs).norm();
            worst_link = std::max(worst_link, std::abs(na - ns) / na);
        }
        check(worst_rt <= 1e-12, "transform round trip", worst_rt, 1e-12);
        check(worst_pars <= 1e-12, "Parseval identity", worst_pars, 1e-12);
        check(worst_link <= 1e-12, "link condition ||Ax|| = ||Sigma0^{1/2}x||", worst_link, 1e-12);
    }

    // Filter-function identities.
    {
        Rng rng(20240903);
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            double lam = std::exp(rng.next_double() * 10.0 - 6.0);
            double alpha = std::exp(rng.next_double() * 6.0 - 3.0);
            int n = 1 + static_cast<int>(rng.next_double() * 400);
            FilterFunctions f = spectral_filter_functions(lam, alpha, n);
            worst = std::max(worst, std::abs(f.q_n * lam + f.r_n - 1.0));
            if (f.q_n > n / alpha * (1.0 + 1e-12)) worst = std::max(worst, 1.0);
        }
        check(worst <= 1e-12, "filter function identities", worst, 1e-12);
    }

    return ok;
}

} // namespace invfilter
