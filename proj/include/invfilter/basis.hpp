#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace invfilter {

// 2D Neumann cosine basis on an n-by-n grid of cell-centered nodes over
// [0,1]^2.  Modes are cos(j*pi*x) cos(k*pi*y) for 0 <= j,k < n with the
// constant mode (0,0) structurally excluded (mean-zero constraint), so the
// spectral dimension is n^2 - 1.
struct Basis2D {
    int n = 0;

    Basis2D() = default;
    explicit Basis2D(int grid_size) : n(grid_size) {
        if (n < 2) throw std::invalid_argument("Basis2D: grid size must be >= 2");
    }

    int nodal_size() const { return n * n; }
    int mode_count() const { return n * n - 1; }

    // Spectral storage index i in [0, n^2-2] maps to mode (j,k) with
    // row-major flat index i+1 (slot 0 would be the excluded (0,0) mode).
    std::pair<int, int> mode(int i) const {
        int f = i + 1;
        return {f / n, f % n};
    }
    int index_of(int j, int k) const { return j * n + k - 1; }

    friend bool operator==(const Basis2D&, const Basis2D&) = default;
};

inline void require_same_basis(const Basis2D& a, const Basis2D& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": basis mismatch");
}

} // namespace invfilter
