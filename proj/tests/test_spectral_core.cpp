#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "invfilter/grid_field.hpp"
#include "invfilter/rng.hpp"
#include "invfilter/spectral_operator.hpp"

using namespace invfilter;

namespace {

GridField random_field(Basis2D b, Rng& rng) {
    std::vector<double> v(b.nodal_size());
    for (auto& x : v) x = rng.next_normal();
    return GridField::nodal(b, std::move(v));
}

double dot(const GridField& a, const GridField& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) acc += a.data()[i] * b.data()[i];
    return acc;
}

// 5-point finite-difference Neumann Laplacian on cell-centered nodes
// (mirror ghost cells), used as an independent oracle for the eigenvalues.
std::vector<double> fd_neumann_laplacian(int n, const std::vector<double>& v) {
    std::vector<double> out(v.size());
    const double h2 = 1.0 / (static_cast<double>(n) * n);
    auto at = [&](int i, int j) {
        i = i < 0 ? 0 : (i >= n ? n - 1 : i);
        j = j < 0 ? 0 : (j >= n ? n - 1 : j);
        return v[static_cast<std::size_t>(i) * n + j];
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out[static_cast<std::size_t>(i) * n + j] =
                (4.0 * at(i, j) - at(i - 1, j) - at(i + 1, j) - at(i, j - 1) - at(i, j + 1)) / h2;
    return out;
}

} // namespace

TEST_CASE("neumann laplacian inverse eigenvalues") {
    Basis2D b(8);
    SpectralOperator A = SpectralOperator::neumann_laplacian_inverse(b);
    CHECK(A.eigenvalue(b.index_of(1, 0)) == doctest::Approx(1.0 / (M_PI * M_PI)).epsilon(1e-14));
    CHECK(A.eigenvalue(b.index_of(1, 1)) == doctest::Approx(1.0 / (2.0 * M_PI * M_PI)).epsilon(1e-14));
    CHECK(b.index_of(0, 0) == -1); // excluded mode has no slot
    CHECK(b.mode_count() == 63);
}

TEST_CASE("eigenvalues match a finite-difference oracle on a 256^2 grid") {
    const int n = 256;
    for (auto [j, k] : {std::pair{1, 0}, std::pair{1, 1}, std::pair{3, 2}}) {
        std::vector<double> v(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int m = 0; m < n; ++m)
                v[static_cast<std::size_t>(i) * n + m] =
                    std::cos(j * M_PI * (i + 0.5) / n) * std::cos(k * M_PI * (m + 0.5) / n);
        std::vector<double> lap = fd_neumann_laplacian(n, v);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            num += lap[i] * v[i];
            den += v[i] * v[i];
        }
        double fd_eig = num / den; // Rayleigh quotient of -Laplace
        double cont = M_PI * M_PI * (j * j + k * k);
        CHECK(std::abs(fd_eig - cont) / cont < 2e-4);
        Basis2D b(8);
        SpectralOperator A = SpectralOperator::neumann_laplacian_inverse(b);
        CHECK(A.eigenvalue(b.index_of(j, k)) == doctest::Approx(1.0 / cont).epsilon(1e-13));
    }
}

TEST_CASE("operator powers") {
    Basis2D b(6);
    SpectralOperator A = SpectralOperator::neumann_laplacian_inverse(b);

    SUBCASE("square root of eigenvalue 4") {
        std::vector<double> eig(b.mode_count(), 4.0);
        SpectralOperator op(b, eig);
        CHECK(op.pow(0.5).eigenvalue(0) == doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("Sigma0 = A^2 per mode") {
        SpectralOperator S0 = operator_power(A, 2.0);
        for (int i = 0; i < b.mode_count(); ++i) {
            auto [j, k] = b.mode(i);
            double want = 1.0 / std::pow(M_PI * M_PI * (j * j + k * k), 2.0);
            CHECK(S0.eigenvalue(i) == doctest::Approx(want).epsilon(1e-13));
        }
    }
    SUBCASE("zeroth power is the identity on the mode set") {
        SpectralOperator I = A.pow(0.0);
        for (int i = 0; i < b.mode_count(); ++i) CHECK(I.eigenvalue(i) == 1.0);
    }
    SUBCASE("power law pow(a+b) = pow(a) o pow(b)") {
        SpectralOperator pa = A.pow(0.7), pb = A.pow(-1.3), pc = A.pow(-0.6);
        for (int i = 0; i < b.mode_count(); ++i) {
            double lhs = pa.eigenvalue(i) * pb.eigenvalue(i);
            CHECK(std::abs(lhs - pc.eigenvalue(i)) / std::abs(pc.eigenvalue(i)) < 1e-12);
        }
    }
    SUBCASE("nonpositive eigenvalue rejected for fractional exponent") {
        std::vector<double> eig(b.mode_count(), 1.0);
        eig[3] = -2.0;
        SpectralOperator op(b, eig);
        CHECK_THROWS_AS(op.pow(0.5), std::domain_error);
        CHECK_THROWS_AS(op.pow(-1.0), std::domain_error);
        CHECK_NOTHROW(op.pow(2.0));
    }
}

TEST_CASE("apply") {
    Basis2D b(8);
    SpectralOperator A = SpectralOperator::neumann_laplacian_inverse(b);
    Rng rng(11);

    SUBCASE("identity") {
        GridField x = random_field(b, rng).to_spectral();
        GridField y = SpectralOperator::identity(b).apply(x);
        for (std::size_t i = 0; i < x.data().size(); ++i) CHECK(y.data()[i] == x.data()[i]);
    }
    SUBCASE("eigenfunction relation for mode (1,0)") {
        std::vector<double> c(b.mode_count(), 0.0);
        c[b.index_of(1, 0)] = 1.0;
        GridField e = GridField::spectral(b, c);
        GridField Ae = A.apply(e);
        CHECK(Ae.data()[b.index_of(1, 0)] == doctest::Approx(1.0 / (M_PI * M_PI)).epsilon(1e-14));
    }
    SUBCASE("inverse composition returns the input") {
        GridField x = random_field(b, rng).to_spectral();
        GridField y = A.apply(A.pow(-1.0).apply(x));
        for (std::size_t i = 0; i < x.data().size(); ++i)
            CHECK(y.data()[i] == doctest::Approx(x.data()[i]).epsilon(1e-12));
    }
    SUBCASE("representation flag preserved and basis mismatch rejected") {
        GridField x = random_field(b, rng);
        CHECK(A.apply(x).repr() == Repr::nodal);
        CHECK(A.apply(x.to_spectral()).repr() == Repr::spectral);
        GridField other = random_field(Basis2D(6), rng);
        CHECK_THROWS_AS(A.apply(other), std::invalid_argument);
    }
    SUBCASE("linearity") {
        GridField x = random_field(b, rng), y = random_field(b, rng);
        GridField lhs = A.apply(2.5 * x + (-1.0) * y);
        GridField rhs = 2.5 * A.apply(x) + (-1.0) * A.apply(y);
        for (std::size_t i = 0; i < lhs.data().size(); ++i)
            CHECK(lhs.data()[i] == doctest::Approx(rhs.data()[i]).epsilon(1e-12));
    }
    SUBCASE("self-adjointness in the nodal inner product") {
        GridField x = random_field(b, rng).to_spectral();
        GridField y = random_field(b, rng).to_spectral();
        CHECK(dot(A.apply(x), y) == doctest::Approx(dot(x, A.apply(y))).epsilon(1e-12));
    }
}

TEST_CASE("cosine transforms") {
    Rng rng(23);
    SUBCASE("constant field has no retained coefficients") {
        Basis2D b(16);
        GridField c = GridField::nodal(b, std::vector<double>(b.nodal_size(), 3.7));
        GridField cs = c.to_spectral();
        for (double v : cs.data()) CHECK(std::abs(v) < 1e-12);
    }
    SUBCASE("cos(pi x) maps to the single coefficient 1/sqrt(2)") {
        Basis2D b(32);
        std::vector<double> v(b.nodal_size());
        for (int i = 0; i < 32; ++i)
            for (int j = 0; j < 32; ++j)
                v[static_cast<std::size_t>(i) * 32 + j] = std::cos(M_PI * (i + 0.5) / 32.0);
        GridField f = GridField::nodal(b, std::move(v)).to_spectral();
        for (int m = 0; m < b.mode_count(); ++m) {
            double want = m == b.index_of(1, 0) ? 1.0 / std::sqrt(2.0) : 0.0;
            CHECK(std::abs(f.data()[m] - want) < 1e-12);
        }
    }
    SUBCASE("round trip is the identity on mean-zero fields") {
        for (int n : {8, 21, 60}) {
            Basis2D b(n);
            GridField x = random_field(b, rng);
            double mean = x.mean();
            GridField back = x.to_spectral().to_nodal();
            double worst = 0.0;
            for (int i = 0; i < b.nodal_size(); ++i)
                worst = std::max(worst, std::abs(back.data()[i] - (x.data()[i] - mean)));
            CHECK(worst / x.norm() < 1e-12);
            CHECK(std::abs(back.mean()) < 1e-12);
        }
    }
    SUBCASE("Parseval identity") {
        Basis2D b(24);
        for (int t = 0; t < 50; ++t) {
            GridField x = random_field(b, rng);
            GridField xs = x.to_spectral();
            GridField xn = xs.to_nodal(); // mean-zero nodal version
            CHECK(std::abs(xn.norm() - xs.norm()) / xs.norm() < 1e-12);
        }
    }
}

TEST_CASE("link condition ratios") {
    Basis2D b(12);
    SpectralOperator A = SpectralOperator::neumann_laplacian_inverse(b);
    SpectralOperator S0 = A.pow(2.0);

    auto [lo1, hi1] = link_condition_check(A, S0, 1.0);
    CHECK(lo1 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(hi1 == doctest::Approx(1.0).epsilon(1e-13));

    auto [lo2, hi2] = link_condition_check(A, A, 2.0);
    CHECK(lo2 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(hi2 == doctest::Approx(1.0).epsilon(1e-13));

    auto [lo3, hi3] = link_condition_check(A, S0, 2.0);
    CHECK(lo3 == doctest::Approx(M_PI * M_PI).epsilon(1e-13)); // 1/kappa at mode (1,0)
    CHECK(hi3 == doctest::Approx(M_PI * M_PI * 2.0 * 11.0 * 11.0).epsilon(1e-13));
    CHECK(hi3 > 1.0);
}

TEST_CASE("exact link-condition norm equality for the experiment operators") {
    Basis2D b(20);
    SpectralOperator A = SpectralOperator::neumann_laplacian_inverse(b);
    SpectralOperator S0_half = A.pow(2.0).pow(0.5);
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        GridField x = random_field(b, rng).to_spectral();
        double na = A.apply(x).norm();
        double ns = S0_half.apply(x).norm();
        CHECK(std::abs(na - ns) / na < 1e-12);
    }
}
