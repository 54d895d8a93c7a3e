#pragma once

#include <cstddef>
#include <vector>

// Low-level data-parallel kernels. Every kernel has a serial reference
// implementation and an OpenMP implementation; the parallel variants only
// split independent-output loops (static schedule, no cross-thread
// reductions), so serial and parallel results are bitwise identical.
// tools/bench_kernels compares their throughput.

namespace invfilter::kernels {

// Global thread budget. 1 selects the serial reference path; 0 means
// "use the OpenMP default". Initialized from INVFILTER_THREADS.
void set_threads(int t);
int threads();
bool parallel_enabled();

// Orthonormal cosine table for grid size n: table[j*n + i] = psi_j(x_i)
// with x_i = (i+1/2)/n, psi_0 = 1 and psi_j = sqrt(2) cos(j pi x) for j>=1.
// Discrete orthogonality: (1/n) sum_i psi_j(x_i) psi_k(x_i) = delta_jk.
const std::vector<double>& cosine_table(int n);

// 2D cosine analysis / synthesis on the full n*n coefficient layout
// (row-major [j][k], including the (0,0) slot).  Analysis computes
// c = (1/n^2) P v P^T so that the cell-centered quadrature norm of v
// equals the l2 norm of c (Parseval).
void dct2_forward_serial(int n, const double* nodal, double* coeff);
void dct2_forward_parallel(int n, const double* nodal, double* coeff);
void dct2_forward(int n, const double* nodal, double* coeff);

void dct2_inverse_serial(int n, const double* coeff, double* nodal);
void dct2_inverse_parallel(int n, const double* coeff, double* nodal);
void dct2_inverse(int n, const double* coeff, double* nodal);

// Tensor-product not-a-knot cubic spline restriction of fine_n x fine_n
// cell-centered nodal values onto a coarse_n x coarse_n grid
// (fine_n = 2 * coarse_n is the usual case but any fine_n > coarse_n >= 4
// works). No mean removal here; callers handle it.
void spline_restrict_serial(int fine_n, int coarse_n, const double* fine, double* coarse);
void spline_restrict_parallel(int fine_n, int coarse_n, const double* fine, double* coarse);
void spline_restrict(int fine_n, int coarse_n, const double* fine, double* coarse);

// One not-a-knot cubic spline line: values f at m uniform knots
// x_i = (i+1/2)*h, evaluated at the points xs. Exposed for testing.
void spline_line(int m, double h, const double* f, int num_eval, const double* xs, double* out);

// Per-mode filter sweeps over diagonal spectra.  mean/cov are updated in
// place; y is the observation's spectral coefficients.
//   kalman:    k = c*kap/(c*kap^2 + g^2); m' = m + k (y - kap m); c' = (1-k kap) c
//   stationary (3DVAR / variant step with gain precomputed from alpha):
//              k = lam*kap/(lam*kap^2 + alpha); m' = m + k (y - kap m)
void kalman_sweep_serial(std::size_t m, const double* kappa, const double* y,
                         double gamma2, double* mean, double* cov);
void kalman_sweep_parallel(std::size_t m, const double* kappa, const double* y,
                           double gamma2, double* mean, double* cov);
void kalman_sweep(std::size_t m, const double* kappa, const double* y,
                  double gamma2, double* mean, double* cov);

void stationary_sweep_serial(std::size_t m, const double* kappa, const double* lambda,
                             const double* y, double alpha, double* mean);
void stationary_sweep_parallel(std::size_t m, const double* kappa, const double* lambda,
                               const double* y, double alpha, double* mean);
void stationary_sweep(std::size_t m, const double* kappa, const double* lambda,
                      const double* y, double alpha, double* mean);

} // namespace invfilter::kernels
