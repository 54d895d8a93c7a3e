#pragma once

#include <utility>
#include <vector>

#include "invfilter/basis.hpp"
#include "invfilter/grid_field.hpp"

namespace invfilter {

// Self-adjoint positive operator diagonal on the shared cosine basis,
// stored by per-mode eigenvalue. Houses the forward operator A, the prior
// covariance Sigma0, the truth covariance Sigma, and their powers; no dense
// matrices anywhere since all operators here commute.
class SpectralOperator {
public:
    SpectralOperator() = default;
    SpectralOperator(Basis2D b, std::vector<double> eigenvalues);

    // A = (-Laplace)^{-1} with homogeneous Neumann data and mean-zero
    // constraint: eigenvalue 1/(pi^2 (j^2 + k^2)) at mode (j,k).
    static SpectralOperator neumann_laplacian_inverse(Basis2D b);
    static SpectralOperator identity(Basis2D b);
    // Truth covariance (-Laplace + shift I)^{-expo}; Sigma of the experiment
    // setup is shift = 1/10, expo = 2s+1.
    static SpectralOperator shifted_laplacian_power(Basis2D b, double shift, double expo);

    const Basis2D& basis() const { return basis_; }
    const std::vector<double>& eigenvalues() const { return eig_; }
    double eigenvalue(int mode_index) const { return eig_[mode_index]; }

    // Fractional/negative powers; rejects nonpositive eigenvalues for
    // non-integer or negative exponents.
    SpectralOperator pow(double exponent) const;
    SpectralOperator scaled(double factor) const;

    // Coefficient-wise application; output representation matches input.
    GridField apply(const GridField& x) const;

    double operator_norm() const; // max |eigenvalue|
    double trace() const;

private:
    Basis2D basis_{};
    std::vector<double> eig_;
};

SpectralOperator operator_power(const SpectralOperator& op, double exponent);
GridField apply(const SpectralOperator& op, const GridField& x);

// Extreme per-mode ratios kappa / lambda^{a/2} of the link condition,
// where kappa are A's singular values and lambda Sigma0's eigenvalues.
// For the experiment operators (Sigma0 = A^2, a = 1) both extremes are 1.
std::pair<double, double> link_condition_check(const SpectralOperator& A,
                                               const SpectralOperator& Sigma0,
                                               double a);

} // namespace invfilter
