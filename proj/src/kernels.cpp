#include "invfilter/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#ifdef INVFILTER_OPENMP
#include <omp.h>
#endif

namespace invfilter::kernels {

namespace {

std::atomic<int> g_threads{-1}; // -1: uninitialized

int read_env_threads() {
    if (const char* e = std::getenv("INVFILTER_THREADS")) {
        int t = std::atoi(e);
        if (t >= 0) return t;
    }
    return 0;
}

int effective_threads() {
    int t = g_threads.load(std::memory_order_relaxed);
    if (t < 0) {
        t = read_env_threads();
        g_threads.store(t, std::memory_order_relaxed);
    }
    return t;
}

} // namespace

void set_threads(int t) { g_threads.store(t < 0 ? 0 : t, std::memory_order_relaxed); }

int threads() { return effective_threads(); }

bool parallel_enabled() {
#ifdef INVFILTER_OPENMP
    return effective_threads() != 1;
#else
    return false;
#endif
}

#ifdef INVFILTER_OPENMP
#define INVFILTER_PRAGMA(x) _Pragma(#x)
#define PARALLEL_FOR(nt) INVFILTER_PRAGMA(omp parallel for schedule(static) num_threads(nt))
namespace {
int omp_threads() {
    int t = effective_threads();
    return t == 0 ? omp_get_max_threads() : t;
}
} // namespace
#endif

const std::vector<double>& cosine_table(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<std::vector<double>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) {
        auto tab = std::make_unique<std::vector<double>>(static_cast<std::size_t>(n) * n);
        const double sqrt2 = std::sqrt(2.0);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                double x = (i + 0.5) / n;
                (*tab)[static_cast<std::size_t>(j) * n + i] =
                    j == 0 ? 1.0 : sqrt2 * std::cos(j * M_PI * x);
            }
        }
        slot = std::move(tab);
    }
    return *slot;
}

namespace {

// tmp = P * v  (rows of P against columns of v), then c = (1/n^2) tmp * P^T.
template <bool Par>
void dct2_forward_impl(int n, const double* v, double* c) {
    const auto& P = cosine_table(n);
    std::vector<double> tmp(static_cast<std::size_t>(n) * n);
#ifdef INVFILTER_OPENMP
    if constexpr (Par) {
        const int nt = omp_threads();
        PARALLEL_FOR(nt)
        for (int j = 0; j < n; ++j) {
            double* row = tmp.data() + static_cast<std::size_t>(j) * n;
            for (int col = 0; col < n; ++col) row[col] = 0.0;
            for (int i = 0; i < n; ++i) {
                double a = P[static_cast<std::size_t>(j) * n + i];
                const double* vrow = v + static_cast<std::size_t>(i) * n;
                for (int col = 0; col < n; ++col) row[col] += a * vrow[col];
            }
        }
        PARALLEL_FOR(nt)
        for (int j = 0; j < n; ++j) {
            const double* row = tmp.data() + static_cast<std::size_t>(j) * n;
            double inv = 1.0 / (static_cast<double>(n) * n);
            for (int k = 0; k < n; ++k) {
                const double* pk = P.data() + static_cast<std::size_t>(k) * n;
                double acc = 0.0;
                for (int col = 0; col < n; ++col) acc += row[col] * pk[col];
                c[static_cast<std::size_t>(j) * n + k] = acc * inv;
            }
        }
        return;
    }
#endif
    for (int j = 0; j < n; ++j) {
        double* row = tmp.data() + static_cast<std::size_t>(j) * n;
        for (int col = 0; col < n; ++col) row[col] = 0.0;
        for (int i = 0; i < n; ++i) {
            double a = P[static_cast<std::size_t>(j) * n + i];
            const double* vrow = v + static_cast<std::size_t>(i) * n;
            for (int col = 0; col < n; ++col) row[col] += a * vrow[col];
        }
    }
    for (int j = 0; j < n; ++j) {
        const double* row = tmp.data() + static_cast<std::size_t>(j) * n;
        double inv = 1.0 / (static_cast<double>(n) * n);
        for (int k = 0; k < n; ++k) {
            const double* pk = P.data() + static_cast<std::size_t>(k) * n;
            double acc = 0.0;
            for (int col = 0; col < n; ++col) acc += row[col] * pk[col];
            c[static_cast<std::size_t>(j) * n + k] = acc * inv;
        }
    }
}

// v = P^T c P: tmp[j][col] = sum_k c[j][k] P[k][col], then
// v[i][col] = sum_j P[j][i] tmp[j][col].
template <bool Par>
void dct2_inverse_impl(int n, const double* c, double* v) {
    const auto& P = cosine_table(n);
    std::vector<double> tmp(static_cast<std::size_t>(n) * n);
#ifdef INVFILTER_OPENMP
    if constexpr (Par) {
        const int nt = omp_threads();
        PARALLEL_FOR(nt)
        for (int j = 0; j < n; ++j) {
            double* row = tmp.data() + static_cast<std::size_t>(j) * n;
            for (int col = 0; col < n; ++col) row[col] = 0.0;
            const double* crow = c + static_cast<std::size_t>(j) * n;
            for (int k = 0; k < n; ++k) {
                double a = crow[k];
                const double* pk = P.data() + static_cast<std::size_t>(k) * n;
                for (int col = 0; col < n; ++col) row[col] += a * pk[col];
            }
        }
        PARALLEL_FOR(nt)
        for (int i = 0; i < n; ++i) {
            double* vrow = v + static_cast<std::size_t>(i) * n;
            for (int col = 0; col < n; ++col) vrow[col] = 0.0;
            for (int j = 0; j < n; ++j) {
                double a = P[static_cast<std::size_t>(j) * n + i];
                const double* trow = tmp.data() + static_cast<std::size_t>(j) * n;
                for (int col = 0; col < n; ++col) vrow[col] += a * trow[col];
            }
        }
        return;
    }
#endif
    for (int j = 0; j < n; ++j) {
        double* row = tmp.data() + static_cast<std::size_t>(j) * n;
        for (int col = 0; col < n; ++col) row[col] = 0.0;
        const double* crow = c + static_cast<std::size_t>(j) * n;
        for (int k = 0; k < n; ++k) {
            double a = crow[k];
            const double* pk = P.data() + static_cast<std::size_t>(k) * n;
            for (int col = 0; col < n; ++col) row[col] += a * pk[col];
        }
    }
    for (int i = 0; i < n; ++i) {
        double* vrow = v + static_cast<std::size_t>(i) * n;
        for (int col = 0; col < n; ++col) vrow[col] = 0.0;
        for (int j = 0; j < n; ++j) {
            double a = P[static_cast<std::size_t>(j) * n + i];
            const double* trow = tmp.data() + static_cast<std::size_t>(j) * n;
            for (int col = 0; col < n; ++col) vrow[col] += a * trow[col];
        }
    }
}

// Not-a-knot cubic spline through m uniform knots; returns second
// derivatives (moments) M_i. Interior relations
//   M_{i-1} + 4 M_i + M_{i+1} = 6 (f_{i-1} - 2 f_i + f_{i+1}) / h^2
// with M_0 = 2M_1 - M_2 and M_{m-1} = 2M_{m-2} - M_{m-3} (third-derivative
// continuity at the first and last interior knots on a uniform grid).
void spline_moments(int m, double h, const double* f, double* M, double* scratch) {
    if (m < 4) throw std::invalid_argument("spline: need at least 4 knots");
    // Thomas on interior unknowns M_1..M_{m-2}.
    const double h2 = h * h;
    int n = m - 2;
    double* cp = scratch;       // n entries
    double* dp = scratch + n;   // n entries
    auto rhs = [&](int i) { // i = 1..m-2
        return 6.0 * (f[i - 1] - 2.0 * f[i] + f[i + 1]) / h2;
    };
    // Row for M_1: substitute M_0 = 2M_1 - M_2: (1*M_0) + 4M_1 + M_2 -> 6M_1 + 0*M_2...
    // M_0 + 4M_1 + M_2 = rhs(1) -> (2M_1 - M_2) + 4M_1 + M_2 = 6M_1 = rhs(1).
    // Row for M_{m-2}: symmetric, 6M_{m-2} = rhs(m-2).
    // Interior rows i = 2..m-3: M_{i-1} + 4M_i + M_{i+1} = rhs(i).
    cp[0] = 0.0;
    dp[0] = rhs(1) / 6.0;
    for (int i = 1; i < n - 1; ++i) {
        double denom = 4.0 - cp[i - 1];
        cp[i] = 1.0 / denom;
        dp[i] = (rhs(i + 1) - dp[i - 1]) / denom;
    }
    if (n >= 2) {
        // Last row 6 M_{m-2} = rhs(m-2): no coupling to M_{m-3}.
        dp[n - 1] = rhs(m - 2) / 6.0;
        cp[n - 1] = 0.0;
    }
    M[m - 2] = dp[n - 1];
    for (int i = n - 2; i >= 0; --i) M[i + 1] = dp[i] - cp[i] * M[i + 2];
    M[0] = 2.0 * M[1] - M[2];
    M[m - 1] = 2.0 * M[m - 2] - M[m - 3];
}

void spline_eval(int m, double h, double x0, const double* f, const double* M,
                 int num_eval, const double* xs, double* out) {
    for (int e = 0; e < num_eval; ++e) {
        double x = xs[e];
        int i = static_cast<int>(std::floor((x - x0) / h));
        if (i < 0) i = 0;
        if (i > m - 2) i = m - 2;
        double xl = x0 + i * h;
        double t = x - xl;      // in [0,h] for interior evaluations
        double u = h - t;
        out[e] = (M[i] * u * u * u + M[i + 1] * t * t * t) / (6.0 * h)
               + (f[i] / h - M[i] * h / 6.0) * u
               + (f[i + 1] / h - M[i + 1] * h / 6.0) * t;
    }
}

template <bool Par>
void spline_restrict_impl(int nf, int nc, const double* fine, double* coarse) {
    const double hf = 1.0 / nf;
    const double x0 = 0.5 * hf;
    std::vector<double> xc(nc);
    for (int i = 0; i < nc; ++i) xc[i] = (i + 0.5) / nc;
    // Pass 1: spline along k (columns of each fine row), evaluate at coarse
    // ordinates -> mid is nf x nc. Pass 2: spline along rows, evaluate at
    // coarse abscissas -> nc x nc.
    std::vector<double> mid(static_cast<std::size_t>(nf) * nc);
    auto line_pass1 = [&](int r, double* M, double* scratch) {
        const double* f = fine + static_cast<std::size_t>(r) * nf;
        spline_moments(nf, hf, f, M, scratch);
        spline_eval(nf, hf, x0, f, M, nc, xc.data(), mid.data() + static_cast<std::size_t>(r) * nc);
    };
    auto line_pass2 = [&](int c, double* col, double* M, double* scratch, double* res) {
        for (int r = 0; r < nf; ++r) col[r] = mid[static_cast<std::size_t>(r) * nc + c];
        spline_moments(nf, hf, col, M, scratch);
        spline_eval(nf, hf, x0, col, M, nc, xc.data(), res);
    };
#ifdef INVFILTER_OPENMP
    if constexpr (Par) {
        const int nt = omp_threads();
        INVFILTER_PRAGMA(omp parallel num_threads(nt))
        {
            std::vector<double> M(nf), scratch(2 * (nf - 2));
            INVFILTER_PRAGMA(omp for schedule(static))
            for (int r = 0; r < nf; ++r) line_pass1(r, M.data(), scratch.data());
        }
        INVFILTER_PRAGMA(omp parallel num_threads(nt))
        {
            std::vector<double> M(nf), scratch(2 * (nf - 2)), col(nf), res(nc);
            INVFILTER_PRAGMA(omp for schedule(static))
            for (int c = 0; c < nc; ++c) {
                line_pass2(c, col.data(), M.data(), scratch.data(), res.data());
                for (int r = 0; r < nc; ++r)
                    coarse[static_cast<std::size_t>(r) * nc + c] = res[r];
            }
        }
        return;
    }
#endif
    {
        std::vector<double> M(nf), scratch(2 * (nf - 2));
        for (int r = 0; r < nf; ++r) line_pass1(r, M.data(), scratch.data());
        std::vector<double> col(nf), res(nc);
        for (int c = 0; c < nc; ++c) {
            line_pass2(c, col.data(), M.data(), scratch.data(), res.data());
            for (int r = 0; r < nc; ++r)
                coarse[static_cast<std::size_t>(r) * nc + c] = res[r];
        }
    }
}

template <bool Par>
void kalman_sweep_impl(std::size_t m, const double* kap, const double* y,
                       double g2, double* mean, double* cov) {
    auto body = [&](std::size_t i) {
        double c = cov[i];
        double k = c * kap[i] / (c * kap[i] * kap[i] + g2);
        mean[i] += k * (y[i] - kap[i] * mean[i]);
        cov[i] = (1.0 - k * kap[i]) * c;
    };
#ifdef INVFILTER_OPENMP
    if constexpr (Par) {
        const int nt = omp_threads();
        PARALLEL_FOR(nt)
        for (long long i = 0; i < static_cast<long long>(m); ++i) body(static_cast<std::size_t>(i));
        return;
    }
#endif
    for (std::size_t i = 0; i < m; ++i) body(i);
}

template <bool Par>
void stationary_sweep_impl(std::size_t m, const double* kap, const double* lam,
                           const double* y, double alpha, double* mean) {
    auto body = [&](std::size_t i) {
        double k = lam[i] * kap[i] / (lam[i] * kap[i] * kap[i] + alpha);
        mean[i] += k * (y[i] - kap[i] * mean[i]);
    };
#ifdef INVFILTER_OPENMP
    if constexpr (Par) {
        const int nt = omp_threads();
        PARALLEL_FOR(nt)
        for (long long i = 0; i < static_cast<long long>(m); ++i) body(static_cast<std::size_t>(i));
        return;
    }
#endif
    for (std::size_t i = 0; i < m; ++i) body(i);
}

} // namespace

void dct2_forward_serial(int n, const double* v, double* c) { dct2_forward_impl<false>(n, v, c); }
void dct2_inverse_serial(int n, const double* c, double* v) { dct2_inverse_impl<false>(n, c, v); }
void spline_restrict_serial(int nf, int nc, const double* f, double* c) { spline_restrict_impl<false>(nf, nc, f, c); }
void kalman_sweep_serial(std::size_t m, const double* kap, const double* y, double g2, double* mean, double* cov) {
    kalman_sweep_impl<false>(m, kap, y, g2, mean, cov);
}
void stationary_sweep_serial(std::size_t m, const double* kap, const double* lam, const double* y, double alpha, double* mean) {
    stationary_sweep_impl<false>(m, kap, lam, y, alpha, mean);
}

#ifdef INVFILTER_OPENMP
void dct2_forward_parallel(int n, const double* v, double* c) { dct2_forward_impl<true>(n, v, c); }
void dct2_inverse_parallel(int n, const double* c, double* v) { dct2_inverse_impl<true>(n, c, v); }
void spline_restrict_parallel(int nf, int nc, const double* f, double* c) { spline_restrict_impl<true>(nf, nc, f, c); }
void kalman_sweep_parallel(std::size_t m, const double* kap, const double* y, double g2, double* mean, double* cov) {
    kalman_sweep_impl<true>(m, kap, y, g2, mean, cov);
}
void stationary_sweep_parallel(std::size_t m, const double* kap, const double* lam, const double* y, double alpha, double* mean) {
    stationary_sweep_impl<true>(m, kap, lam, y, alpha, mean);
}
#else
void dct2_forward_parallel(int n, const double* v, double* c) { dct2_forward_serial(n, v, c); }
void dct2_inverse_parallel(int n, const double* c, double* v) { dct2_inverse_serial(n, c, v); }
void spline_restrict_parallel(int nf, int nc, const double* f, double* c) { spline_restrict_serial(nf, nc, f, c); }
void kalman_sweep_parallel(std::size_t m, const double* kap, const double* y, double g2, double* mean, double* cov) {
    kalman_sweep_serial(m, kap, y, g2, mean, cov);
}
void stationary_sweep_parallel(std::size_t m, const double* kap, const double* lam, const double* y, double alpha, double* mean) {
    stationary_sweep_serial(m, kap, lam, y, alpha, mean);
}
#endif

// Dispatch thresholds: below these sizes the fork-join overhead exceeds the
// loop body (see tools/bench_kernels), so the serial reference runs. Callers
// that want guaranteed parallel/serial execution use the explicit variants.
namespace {
constexpr int kDctParallelMinN = 192;
constexpr std::size_t kSweepParallelMinModes = 1u << 16;
constexpr int kSplineParallelMinFine = 192;
} // namespace

void dct2_forward(int n, const double* v, double* c) {
    (parallel_enabled() && n >= kDctParallelMinN) ? dct2_forward_parallel(n, v, c)
                                                  : dct2_forward_serial(n, v, c);
}
void dct2_inverse(int n, const double* c, double* v) {
    (parallel_enabled() && n >= kDctParallelMinN) ? dct2_inverse_parallel(n, c, v)
                                                  : dct2_inverse_serial(n, c, v);
}
void spline_restrict(int nf, int nc, const double* f, double* c) {
    (parallel_enabled() && nf >= kSplineParallelMinFine)
        ? spline_restrict_parallel(nf, nc, f, c)
        : spline_restrict_serial(nf, nc, f, c);
}
void kalman_sweep(std::size_t m, const double* kap, const double* y, double g2, double* mean, double* cov) {
    (parallel_enabled() && m >= kSweepParallelMinModes)
        ? kalman_sweep_parallel(m, kap, y, g2, mean, cov)
        : kalman_sweep_serial(m, kap, y, g2, mean, cov);
}
void stationary_sweep(std::size_t m, const double* kap, const double* lam, const double* y, double alpha, double* mean) {
    (parallel_enabled() && m >= kSweepParallelMinModes)
        ? stationary_sweep_parallel(m, kap, lam, y, alpha, mean)
        : stationary_sweep_serial(m, kap, lam, y, alpha, mean);
}

void spline_line(int m, double h, const double* f, int num_eval, const double* xs, double* out) {
    std::vector<double> M(m), scratch(2 * (m - 2));
    spline_moments(m, h, f, M.data(), scratch.data());
    spline_eval(m, h, 0.5 * h, f, M.data(), num_eval, xs, out);
}

} // namespace invfilter::kernels
