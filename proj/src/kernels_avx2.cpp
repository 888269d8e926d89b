#include <immintrin.h>

#include "ordmed/kernels.hpp"

// Four independent accumulators hide FMA latency; the reduction order is
// fixed, so results are reproducible run-to-run.
namespace ordmed::kern::detail {

static inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swap = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swap));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
    a2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), a2);
    a3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), a3);
  }
  for (; i + 4 <= n; i += 4)
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
  double acc = hsum(_mm256_add_pd(_mm256_add_pd(a0, a1), _mm256_add_pd(a2, a3)));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double wdot_avx2(const double* x, const double* y, const double* w, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4));
    a0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(w + i), a0);
    a1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(w + i + 4), a1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d p = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    a0 = _mm256_fmadd_pd(p, _mm256_loadu_pd(w + i), a0);
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += x[i] * y[i] * w[i];
  return acc;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal_avx2(double a, double* x, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

double nrm2sq_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

// 4x4 register block: 16 accumulators, 8 loads per k-step of 4.
static void gemm_panel_4x4(int k, const double* a0, const double* a1, const double* a2,
                           const double* a3, const double* b0, const double* b1,
                           const double* b2, const double* b3, double* out /*16, row i maj*/) {
  __m256d acc[16];
  for (auto& v : acc) v = _mm256_setzero_pd();
  int p = 0;
  for (; p + 4 <= k; p += 4) {
    __m256d va0 = _mm256_loadu_pd(a0 + p), va1 = _mm256_loadu_pd(a1 + p);
    __m256d va2 = _mm256_loadu_pd(a2 + p), va3 = _mm256_loadu_pd(a3 + p);
    __m256d vb0 = _mm256_loadu_pd(b0 + p), vb1 = _mm256_loadu_pd(b1 + p);
    __m256d vb2 = _mm256_loadu_pd(b2 + p), vb3 = _mm256_loadu_pd(b3 + p);
    acc[0] = _mm256_fmadd_pd(va0, vb0, acc[0]);
    acc[1] = _mm256_fmadd_pd(va0, vb1, acc[1]);
    acc[2] = _mm256_fmadd_pd(va0, vb2, acc[2]);
    acc[3] = _mm256_fmadd_pd(va0, vb3, acc[3]);
    acc[4] = _mm256_fmadd_pd(va1, vb0, acc[4]);
    acc[5] = _mm256_fmadd_pd(va1, vb1, acc[5]);
    acc[6] = _mm256_fmadd_pd(va1, vb2, acc[6]);
    acc[7] = _mm256_fmadd_pd(va1, vb3, acc[7]);
    acc[8] = _mm256_fmadd_pd(va2, vb0, acc[8]);
    acc[9] = _mm256_fmadd_pd(va2, vb1, acc[9]);
    acc[10] = _mm256_fmadd_pd(va2, vb2, acc[10]);
    acc[11] = _mm256_fmadd_pd(va2, vb3, acc[11]);
    acc[12] = _mm256_fmadd_pd(va3, vb0, acc[12]);
    acc[13] = _mm256_fmadd_pd(va3, vb1, acc[13]);
    acc[14] = _mm256_fmadd_pd(va3, vb2, acc[14]);
    acc[15] = _mm256_fmadd_pd(va3, vb3, acc[15]);
  }
  const double* as[4] = {a0, a1, a2, a3};
  const double* bs[4] = {b0, b1, b2, b3};
  for (int i = 0; i < 16; ++i) out[i] = hsum(acc[i]);
  for (; p < k; ++p)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) out[i * 4 + j] += as[i][p] * bs[j][p];
}

static void gemm_nt_axpy(int m, int n, int k, double sgn, const double* A, const double* B,
                         double* C, int ldc) {
  const auto arow = [&](int i) { return A + std::size_t(i) * k; };
  const auto brow = [&](int j) { return B + std::size_t(j) * k; };
  int i = 0;
  for (; i + 4 <= m; i += 4) {
    int j = 0;
    for (; j + 4 <= n; j += 4) {
      double blk[16];
      gemm_panel_4x4(k, arow(i), arow(i + 1), arow(i + 2), arow(i + 3), brow(j), brow(j + 1),
                     brow(j + 2), brow(j + 3), blk);
      for (int jj = 0; jj < 4; ++jj)
        for (int ii = 0; ii < 4; ++ii)
          C[(i + ii) + std::size_t(j + jj) * ldc] += sgn * blk[ii * 4 + jj];
    }
    for (; j < n; ++j)
      for (int ii = 0; ii < 4; ++ii)
        C[(i + ii) + std::size_t(j) * ldc] += sgn * dot_avx2(arow(i + ii), brow(j), k);
  }
  for (; i < m; ++i)
    for (int j = 0; j < n; ++j) C[i + std::size_t(j) * ldc] += sgn * dot_avx2(arow(i), brow(j), k);
}

void gemm_nt_sub_avx2(int m, int n, int k, const double* A, const double* B, double* C,
                      int ldc) {
  gemm_nt_axpy(m, n, k, -1.0, A, B, C, ldc);
}

void gemm_nt_acc_avx2(int m, int n, int k, const double* A, const double* B, double* C,
                      int ldc) {
  gemm_nt_axpy(m, n, k, 1.0, A, B, C, ldc);
}

}  // namespace ordmed::kern::detail
