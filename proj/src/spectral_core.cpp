#include "invfilter/grid_field.hpp"
#include "invfilter/spectral_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace invfilter {

GridField transform_to_spectral(const GridField& x) {
    if (x.repr() == Repr::spectral) return x;
    const int n = x.basis().n;
    std::vector<double> full(static_cast<std::size_t>(n) * n);
    kernels::dct2_forward(n, x.data().data(), full.data());
    // Drop the (0,0) slot.
    std::vector<double> coeffs(full.begin() + 1, full.end());
    return GridField::spectral(x.basis(), std::move(coeffs));
}

GridField transform_to_nodal(const GridField& x) {
    if (x.repr() == Repr::nodal) return x;
    const int n = x.basis().n;
    std::vector<double> full(static_cast<std::size_t>(n) * n);
    full[0] = 0.0;
    std::copy(x.data().begin(), x.data().end(), full.begin() + 1);
    std::vector<double> nodal(static_cast<std::size_t>(n) * n);
    kernels::dct2_inverse(n, full.data(), nodal.data());
    return GridField::nodal(x.basis(), std::move(nodal));
}

SpectralOperator::SpectralOperator(Basis2D b, std::vector<double> eigenvalues)
    : basis_(b), eig_(std::move(eigenvalues)) {
    if (static_cast<int>(eig_.size()) != basis_.mode_count())
        throw std::invalid_argument("SpectralOperator: eigenvalue count mismatch");
}

SpectralOperator SpectralOperator::neumann_laplacian_inverse(Basis2D b) {
    std::vector<double> eig(b.mode_count());
    for (int i = 0; i < b.mode_count(); ++i) {
        auto [j, k] = b.mode(i);
        eig[i] = 1.0 / (M_PI * M_PI * (static_cast<double>(j) * j + static_cast<double>(k) * k));
    }
    return SpectralOperator(b, std::move(eig));
}

SpectralOperator SpectralOperator::identity(Basis2D b) {
    return SpectralOperator(b, std::vector<double>(b.mode_count(), 1.0));
}

SpectralOperator SpectralOperator::shifted_laplacian_power(Basis2D b, double shift, double expo) {
    std::vector<double> eig(b.mode_count());
    for (int i = 0; i < b.mode_count(); ++i) {
        auto [j, k] = b.mode(i);
        double mu = M_PI * M_PI * (static_cast<double>(j) * j + static_cast<double>(k) * k) + shift;
        eig[i] = std::pow(mu, -expo);
    }
    return SpectralOperator(b, std::move(eig));
}

SpectralOperator SpectralOperator::pow(double exponent) const {
    bool integral_nonneg = exponent >= 0.0 && exponent == std::floor(exponent);
    std::vector<double> eig(eig_.size());
    for (std::size_t i = 0; i < eig_.size(); ++i) {
        if (eig_[i] <= 0.0 && !integral_nonneg)
            throw std::domain_error("operator_power: nonpositive eigenvalue with fractional or negative exponent");
        eig[i] = std::pow(eig_[i], exponent);
    }
    return SpectralOperator(basis_, std::move(eig));
}

SpectralOperator SpectralOperator::scaled(double factor) const {
    std::vector<double> eig(eig_.size());
    for (std::size_t i = 0; i < eig_.size(); ++i) eig[i] = factor * eig_[i];
    return SpectralOperator(basis_, std::move(eig));
}

GridField SpectralOperator::apply(const GridField& x) const {
    require_same_basis(basis_, x.basis(), "SpectralOperator::apply");
    const Repr out_repr = x.repr();
    GridField xs = x.in(Repr::spectral);
    auto d = xs.mutable_data();
    for (std::size_t i = 0; i < eig_.size(); ++i) d[i] *= eig_[i];
    return xs.in(out_repr);
}

double SpectralOperator::operator_norm() const {
    double m = 0.0;
    for (double e : eig_) m = std::max(m, std::abs(e));
    return m;
}

double SpectralOperator::trace() const {
    double t = 0.0;
    for (double e : eig_) t += e;
    return t;
}

SpectralOperator operator_power(const SpectralOperator& op, double exponent) { return op.pow(exponent); }

GridField apply(const SpectralOperator& op, const GridField& x) { return op.apply(x); }

std::pair<double, double> link_condition_check(const SpectralOperator& A,
                                               const SpectralOperator& Sigma0,
                                               double a) {
    require_same_basis(A.basis(), Sigma0.basis(), "link_condition_check");
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    const auto& kap = A.eigenvalues();
    const auto& lam = Sigma0.eigenvalues();
    for (std::size_t i = 0; i < kap.size(); ++i) {
        double r = kap[i] / std::pow(lam[i], 0.5 * a);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo, hi};
}

} // namespace invfilter
