#include "invfilter/frame.hpp"

#include <cmath>

namespace invfilter {

NormalizedProblem make_frame(const ProblemSpec& spec) {
    NormalizedProblem f;
    f.coarse = Basis2D(spec.coarse_n);
    f.fine = Basis2D(spec.fine_n);
    SpectralOperator A_c = SpectralOperator::neumann_laplacian_inverse(f.coarse);
    SpectralOperator A_f = SpectralOperator::neumann_laplacian_inverse(f.fine);
    f.op_scale = 1.0 / A_c.operator_norm(); // largest singular value sits at mode (1,0)
    f.A_coarse = A_c.scaled(f.op_scale);
    f.A_fine = A_f.scaled(f.op_scale);
    f.Sigma0_coarse = f.A_coarse.pow(2.0);
    SpectralOperator sigma_truth =
        SpectralOperator::shifted_laplacian_power(f.fine, 0.1, 2.0 * spec.s + 1.0);
    f.truth_scale = std::sqrt(sigma_truth.trace());
    return f;
}

TruthSample sample_truth_normalized(const ProblemSpec& spec, const NormalizedProblem& frame) {
    TruthSample t = sample_truth(spec);
    double inv = 1.0 / frame.truth_scale;
    t.fine_field *= inv;
    t.coarse_projection *= inv;
    return t;
}

double resolve_gamma(const ProblemSpec& spec, const NormalizedProblem& frame,
                     const TruthSample& truth_hat) {
    if (spec.gamma) return *spec.gamma;
    if (spec.rho) return calibrate_gamma(truth_hat, frame.A_fine, *spec.rho);
    throw std::invalid_argument("resolve_gamma: spec carries neither gamma nor rho");
}

} // namespace invfilter
