#pragma once

#include <cstddef>

// Dense vector kernels used by the factorization and solver inner loops.
// A scalar reference implementation always exists; an AVX2/FMA variant is
// selected at startup when the CPU supports it. Both variants are
// deterministic run-to-run; they may differ from each other in the last
// ulps because the SIMD reductions reassociate sums.
namespace ordmed::kern {

enum class Backend { scalar, avx2 };

Backend active_backend();
bool avx2_available();
// Overrides the dispatch table. Used by equivalence tests; set_backend with
// an unavailable backend is a no-op and returns false.
bool set_backend(Backend b);

double dot(const double* x, const double* y, std::size_t n);
// sum_i x[i]*y[i]*w[i]
double wdot(const double* x, const double* y, const double* w, std::size_t n);
// y += a*x
void axpy(double a, const double* x, double* y, std::size_t n);
void scal(double a, double* x, std::size_t n);
double nrm2sq(const double* x, std::size_t n);
// C -= A * B^T with A (m x k) and B (n x k) packed row-major and C
// column-major with leading dimension ldc. The workhorse behind the blocked
// LDL^T trailing update and Gram-matrix assembly.
void gemm_nt_sub(int m, int n, int k, const double* A, const double* B, double* C, int ldc);
// C += A * B^T, same layout conventions.
void gemm_nt_acc(int m, int n, int k, const double* A, const double* B, double* C, int ldc);

}  // namespace ordmed::kern
