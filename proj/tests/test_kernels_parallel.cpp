#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "invfilter/kernels.hpp"
#include "invfilter/rng.hpp"

using namespace invfilter;

// The OpenMP kernels only split independent-output loops, so they must be
// bitwise identical to the serial reference implementations.

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.next_normal();
    return v;
}

} // namespace

TEST_CASE("dct2 parallel matches serial bitwise") {
    Rng rng(1);
    for (int n : {16, 60, 120}) {
        auto v = random_vec(static_cast<std::size_t>(n) * n, rng);
        std::vector<double> c1(v.size()), c2(v.size()), b1(v.size()), b2(v.size());
        kernels::dct2_forward_serial(n, v.data(), c1.data());
        kernels::dct2_forward_parallel(n, v.data(), c2.data());
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(c1[i] == c2[i]);
        kernels::dct2_inverse_serial(n, c1.data(), b1.data());
        kernels::dct2_inverse_parallel(n, c1.data(), b2.data());
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(b1[i] == b2[i]);
    }
}

TEST_CASE("spline restriction parallel matches serial bitwise") {
    Rng rng(2);
    for (auto [nf, nc] : {std::pair{64, 32}, std::pair{120, 60}}) {
        auto v = random_vec(static_cast<std::size_t>(nf) * nf, rng);
        std::vector<double> a(static_cast<std::size_t>(nc) * nc), b(a.size());
        kernels::spline_restrict_serial(nf, nc, v.data(), a.data());
        kernels::spline_restrict_parallel(nf, nc, v.data(), b.data());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }
}

TEST_CASE("filter sweeps parallel match serial bitwise") {
    Rng rng(3);
    const std::size_t m = 14399;
    auto kap = random_vec(m, rng);
    auto lam = random_vec(m, rng);
    for (auto& x : kap) x = std::abs(x) + 0.1;
    for (auto& x : lam) x = std::abs(x) + 0.1;
    auto y = random_vec(m, rng);

    auto mean1 = random_vec(m, rng);
    auto mean2 = mean1;
    std::vector<double> cov1(m, 0.7), cov2(m, 0.7);
    kernels::kalman_sweep_serial(m, kap.data(), y.data(), 0.25, mean1.data(), cov1.data());
    kernels::kalman_sweep_parallel(m, kap.data(), y.data(), 0.25, mean2.data(), cov2.data());
    for (std::size_t i = 0; i < m; ++i) {
        CHECK(mean1[i] == mean2[i]);
        CHECK(cov1[i] == cov2[i]);
    }

    auto s1 = random_vec(m, rng);
    auto s2 = s1;
    kernels::stationary_sweep_serial(m, kap.data(), lam.data(), y.data(), 0.8, s1.data());
    kernels::stationary_sweep_parallel(m, kap.data(), lam.data(), y.data(), 0.8, s2.data());
    for (std::size_t i = 0; i < m; ++i) CHECK(s1[i] == s2[i]);
}

TEST_CASE("dispatch respects the thread setting") {
    Rng rng(4);
    const int n = 32;
    auto v = random_vec(static_cast<std::size_t>(n) * n, rng);
    std::vector<double> a(v.size()), b(v.size());
    kernels::set_threads(1);
    CHECK_FALSE(kernels::parallel_enabled());
    kernels::dct2_forward(n, v.data(), a.data());
    kernels::set_threads(4);
    kernels::dct2_forward(n, v.data(), b.data());
    kernels::set_threads(0);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("not-a-knot spline line interpolates smooth data to high order") {
    const int m = 128;
    const double h = 1.0 / m;
    std::vector<double> f(m);
    for (int i = 0; i < m; ++i) f[i] = std::cos(M_PI * (i + 0.5) * h);
    std::vector<double> xs = {0.031, 0.25, 0.5, 0.77, 0.969};
    std::vector<double> out(xs.size());
    kernels::spline_line(m, h, f.data(), static_cast<int>(xs.size()), xs.data(), out.data());
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK(std::abs(out[i] - std::cos(M_PI * xs[i])) < 1e-7);
}
