#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "invfilter/basis.hpp"
#include "invfilter/kernels.hpp"

namespace invfilter {

enum class Repr { nodal, spectral };

// Real field on the n x n cell-centered grid of [0,1]^2, carried either as
// nodal values (length n^2) or cosine coefficients over the mean-zero mode
// set (length n^2 - 1).  Immutable value type; transforms return copies.
//
// Norms: the nodal norm is the cell-centered L^2([0,1]^2) quadrature norm
// sqrt((1/n^2) sum v^2); by Parseval it equals the coefficient l2 norm.
class GridField {
public:
    GridField() = default;

    static GridField zeros(Basis2D b, Repr r) {
        GridField f;
        f.basis_ = b;
        f.repr_ = r;
        f.data_.assign(r == Repr::nodal ? b.nodal_size() : b.mode_count(), 0.0);
        return f;
    }
    static GridField nodal(Basis2D b, std::vector<double> values) {
        if (static_cast<int>(values.size()) != b.nodal_size())
            throw std::invalid_argument("GridField: nodal size mismatch");
        GridField f;
        f.basis_ = b;
        f.repr_ = Repr::nodal;
        f.data_ = std::move(values);
        return f;
    }
    static GridField spectral(Basis2D b, std::vector<double> coeffs) {
        if (static_cast<int>(coeffs.size()) != b.mode_count())
            throw std::invalid_argument("GridField: spectral size mismatch");
        GridField f;
        f.basis_ = b;
        f.repr_ = Repr::spectral;
        f.data_ = std::move(coeffs);
        return f;
    }

    const Basis2D& basis() const { return basis_; }
    Repr repr() const { return repr_; }
    std::span<const double> data() const { return data_; }
    std::span<double> mutable_data() { return data_; }

    GridField to_spectral() const;
    GridField to_nodal() const;
    // Returns this field in the representation of `r`.
    GridField in(Repr r) const { return r == repr_ ? *this : (r == Repr::spectral ? to_spectral() : to_nodal()); }

    double norm() const {
        double acc = 0.0;
        for (double v : data_) acc += v * v;
        if (repr_ == Repr::nodal) acc /= static_cast<double>(basis_.nodal_size());
        return std::sqrt(acc);
    }

    double mean() const {
        if (repr_ == Repr::spectral) return 0.0;
        double acc = 0.0;
        for (double v : data_) acc += v;
        return acc / static_cast<double>(data_.size());
    }

    GridField& operator+=(const GridField& o) { return axpy(1.0, o); }
    GridField& operator-=(const GridField& o) { return axpy(-1.0, o); }
    GridField& operator*=(double a) {
        for (double& v : data_) v *= a;
        return *this;
    }
    GridField& axpy(double a, const GridField& o) {
        require_same_basis(basis_, o.basis_, "GridField::axpy");
        if (repr_ != o.repr_) throw std::invalid_argument("GridField::axpy: representation mismatch");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * o.data_[i];
        return *this;
    }

    friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
    friend GridField operator*(double a, GridField f) { return f *= a; }

private:
    Basis2D basis_{};
    Repr repr_ = Repr::nodal;
    std::vector<double> data_;
};

// Orthogonal cosine transform pair. The (0,0) coefficient is dropped going
// in (mean removal) and restored as zero coming out.
GridField transform_to_spectral(const GridField& x);
GridField transform_to_nodal(const GridField& x);

inline GridField GridField::to_spectral() const { return transform_to_spectral(*this); }
inline GridField GridField::to_nodal() const { return transform_to_nodal(*this); }

} // namespace invfilter
