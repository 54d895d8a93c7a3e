// Compares the serial reference kernels with the OpenMP variants.
// Usage: bench_kernels [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "invfilter/kernels.hpp"
#include "invfilter/rng.hpp"

using namespace invfilter;
using Clock = std::chrono::steady_clock;

namespace {

double time_loop(int iters, const auto& fn) {
    fn(); // warm up
    auto t0 = Clock::now();
    for (int i = 0; i < iters; ++i) fn();
    return std::chrono::duration<double>(Clock::now() - t0).count() / iters;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", name, serial * 1e3, parallel * 1e3,
                serial / parallel);
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) kernels::set_threads(std::atoi(argv[1]));
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    Rng rng(1);
    {
        const int n = 120;
        std::vector<double> v(static_cast<std::size_t>(n) * n), c(v.size());
        for (auto& x : v) x = rng.next_normal();
        report("dct2 forward 120x120",
               time_loop(50, [&] { kernels::dct2_forward_serial(n, v.data(), c.data()); }),
               time_loop(50, [&] { kernels::dct2_forward_parallel(n, v.data(), c.data()); }));
        report("dct2 inverse 120x120",
               time_loop(50, [&] { kernels::dct2_inverse_serial(n, c.data(), v.data()); }),
               time_loop(50, [&] { kernels::dct2_inverse_parallel(n, c.data(), v.data()); }));
    }
    {
        const int nf = 120, nc = 60;
        std::vector<double> f(static_cast<std::size_t>(nf) * nf), c(static_cast<std::size_t>(nc) * nc);
        for (auto& x : f) x = rng.next_normal();
        report("spline restrict 120->60",
               time_loop(100, [&] { kernels::spline_restrict_serial(nf, nc, f.data(), c.data()); }),
               time_loop(100, [&] { kernels::spline_restrict_parallel(nf, nc, f.data(), c.data()); }));
    }
    {
        const std::size_t m = 3599; // 60x60 grid mode count
        const int steps = 1000;
        std::vector<double> kap(m), y(m), mean(m, 0.0), cov(m, 1.0), lam(m);
        for (std::size_t i = 0; i < m; ++i) {
            kap[i] = 1.0 / (1.0 + static_cast<double>(i));
            lam[i] = kap[i] * kap[i];
            y[i] = rng.next_normal();
        }
        report("kalman sweep 3599 x 1000",
               time_loop(5,
                         [&] {
                             std::vector<double> mu = mean, cv = cov;
                             for (int s = 0; s < steps; ++s)
                                 kernels::kalman_sweep_serial(m, kap.data(), y.data(), 0.01,
                                                              mu.data(), cv.data());
                         }),
               time_loop(5, [&] {
                   std::vector<double> mu = mean, cv = cov;
                   for (int s = 0; s < steps; ++s)
                       kernels::kalman_sweep_parallel(m, kap.data(), y.data(), 0.01, mu.data(),
                                                      cv.data());
               }));
        report("stationary sweep 3599 x 1000",
               time_loop(5,
                         [&] {
                             std::vector<double> mu = mean;
                             for (int s = 0; s < steps; ++s)
                                 kernels::stationary_sweep_serial(m, kap.data(), lam.data(),
                                                                  y.data(), 0.5, mu.data());
                         }),
               time_loop(5, [&] {
                   std::vector<double> mu = mean;
                   for (int s = 0; s < steps; ++s)
                       kernels::stationary_sweep_parallel(m, kap.data(), lam.data(), y.data(), 0.5,
                                                          mu.data());
               }));
    }
    return 0;
}
