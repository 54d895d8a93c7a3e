#include "invfilter/problem.hpp"

#include <cmath>

namespace invfilter {

std::vector<std::string> ProblemSpec::validate() const {
    std::vector<std::string> issues;
    if (coarse_n < 4) issues.push_back("coarse_n must be >= 4");
    if (fine_n <= coarse_n) issues.push_back("fine_n must exceed coarse_n");
    if (s <= 0.0) issues.push_back("s must be positive");
    if (a <= 0.0) issues.push_back("a must be positive");
    if (gamma && *gamma < 0.0) issues.push_back("gamma must be nonnegative");
    if (rho && (*rho <= 0.0 || *rho >= 1.0)) issues.push_back("rho must lie in (0,1)");
    if (budget_n < 1) issues.push_back("iteration budget must be >= 1");
    if (alpha_rule.kind != AlphaRule::Kind::from_budget && alpha_rule.alpha <= 0.0)
        issues.push_back("alpha must be positive");
    if (alpha_rule.kind == AlphaRule::Kind::variant_geometric &&
        (alpha_rule.q <= 0.0 || alpha_rule.q >= 1.0))
        issues.push_back("geometric schedule requires 0 < q < 1");
    return issues;
}

std::vector<std::string> ProblemSpec::warnings() const {
    std::vector<std::string> w;
    if (s > a + 2.0)
        w.push_back("s exceeds a + 2: outside the source-condition range, rates may degrade");
    return w;
}

TruthSample sample_truth(const ProblemSpec& spec) {
    Basis2D fine(spec.fine_n);
    SpectralOperator sigma =
        SpectralOperator::shifted_laplacian_power(fine, 0.1, 2.0 * spec.s + 1.0);
    Rng rng(mix_seed(spec.seed, 0x7275746874ULL));
    std::vector<double> coeffs(fine.mode_count());
    for (int i = 0; i < fine.mode_count(); ++i)
        coeffs[i] = std::sqrt(sigma.eigenvalue(i)) * rng.next_normal();
    GridField u = GridField::spectral(fine, std::move(coeffs)).to_nodal();
    GridField proj = restrict_to_coarse(u, spec.coarse_n);
    return {std::move(u), std::move(proj)};
}

GridField restrict_to_coarse(const GridField& fine, int coarse_n) {
    const int nf = fine.basis().n;
    if (nf <= coarse_n) throw std::invalid_argument("restrict_to_coarse: fine grid must be finer");
    GridField fn = fine.in(Repr::nodal);
    Basis2D coarse(coarse_n);
    std::vector<double> out(static_cast<std::size_t>(coarse_n) * coarse_n);
    kernels::spline_restrict(nf, coarse_n, fn.data().data(), out.data());
    double mean = 0.0;
    for (double v : out) mean += v;
    mean /= static_cast<double>(out.size());
    for (double& v : out) v -= mean;
    return GridField::nodal(coarse, std::move(out));
}

double calibrate_gamma(const TruthSample& truth, const SpectralOperator& A_fine, double rho) {
    if (rho < 0.0 || rho >= 1.0) throw std::invalid_argument("calibrate_gamma: rho must lie in [0,1)");
    const int coarse_n = truth.coarse_projection.basis().n;
    GridField data = restrict_to_coarse(A_fine.apply(truth.fine_field), coarse_n);
    double norm = data.norm();
    if (norm == 0.0) throw std::domain_error("calibrate_gamma: zero truth");
    double dim = static_cast<double>(coarse_n) * coarse_n - 1.0;
    return rho * norm / std::sqrt(dim);
}

DataStream::DataStream(DataModel model, GridField noise_free_fine_nodal, int coarse_n,
                       double gamma, std::uint64_t seed)
    : model_(model),
      noise_free_fine_(noise_free_fine_nodal.in(Repr::nodal)),
      noise_free_coarse_(restrict_to_coarse(noise_free_fine_, coarse_n).to_spectral()),
      coarse_n_(coarse_n),
      gamma_(gamma),
      seed_(seed) {
    if (gamma_ < 0.0) throw std::invalid_argument("DataStream: negative gamma");
    if (model_ == DataModel::dm2) dm2_cache_ = make_observation(1);
}

GridField DataStream::make_observation(int index) const {
    const int nf = noise_free_fine_.basis().n;
    // Per-fine-node std gamma * nf gives per-coefficient std gamma on the
    // fine basis, hence ~gamma per coarse coefficient after restriction.
    const double node_std = gamma_ * static_cast<double>(nf);
    Rng rng(mix_seed(seed_, static_cast<std::uint64_t>(index)));
    std::vector<double> noisy(noise_free_fine_.data().begin(), noise_free_fine_.data().end());
    for (double& v : noisy) v += node_std * rng.next_normal();
    GridField fine = GridField::nodal(noise_free_fine_.basis(), std::move(noisy));
    return restrict_to_coarse(fine, coarse_n_).to_spectral();
}

GridField DataStream::observation(int index) const {
    if (index < 1) throw std::invalid_argument("DataStream: observation index starts at 1");
    if (model_ == DataModel::dm2) return dm2_cache_;
    return make_observation(index);
}

DataStream generate_data(const ProblemSpec& spec, const TruthSample& truth,
                         const SpectralOperator& A_fine, double gamma) {
    GridField noise_free = A_fine.apply(truth.fine_field).in(Repr::nodal);
    return DataStream(spec.data_model, std::move(noise_free), spec.coarse_n, gamma,
                      mix_seed(spec.seed, 0x64617461ULL));
}

AveragedObservation average_observations(const DataStream& stream, int n) {
    if (stream.model() != DataModel::dm1)
        throw std::invalid_argument("average_observations: requires a DM1 stream");
    if (n < 1) throw std::invalid_argument("average_observations: n must be >= 1");
    GridField acc = stream.observation(1);
    for (int i = 2; i <= n; ++i) acc += stream.observation(i);
    acc *= 1.0 / static_cast<double>(n);
    return {std::move(acc), 1.0 / std::sqrt(static_cast<double>(n))};
}

} // namespace invfilter
