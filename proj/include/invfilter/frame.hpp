#pragma once

#include "invfilter/problem.hpp"
#include "invfilter/spectral_operator.hpp"

namespace invfilter {

// Dimensionless working frame for the grid experiments. The parameter
// selection rules (alpha = N^{s/(s+a+1)}, the DM2 noise/stop coupling
// gamma^2 = N^{-(a+s+1)/(a+1)}) treat the forward operator, the prior and
// the truth as order-one quantities, so the experiments re-express the
// problem with the forward operator scaled to unit norm and the truth to
// unit expected energy.  Slopes and stopping behavior are invariant under
// the re-expression; reported errors are relative to unit truth energy.
struct NormalizedProblem {
    Basis2D coarse;
    Basis2D fine;
    SpectralOperator A_coarse;      // unit operator norm
    SpectralOperator Sigma0_coarse; // A_coarse^2
    SpectralOperator A_fine;        // same scaling as A_coarse
    double op_scale = 1.0;          // A_hat = op_scale * A
    double truth_scale = 1.0;       // u_hat = u / truth_scale
};

NormalizedProblem make_frame(const ProblemSpec& spec);

// Truth draw expressed in frame units (unit expected energy).
TruthSample sample_truth_normalized(const ProblemSpec& spec, const NormalizedProblem& frame);

// Frame-units noise std for the spec: explicit gamma is taken verbatim,
// rho is calibrated against the frame-units noise-free data.
double resolve_gamma(const ProblemSpec& spec, const NormalizedProblem& frame,
                     const TruthSample& truth_hat);

} // namespace invfilter
