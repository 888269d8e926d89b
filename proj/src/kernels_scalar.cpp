#include "ordmed/kernels.hpp"

namespace ordmed::kern::detail {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double wdot_scalar(const double* x, const double* y, const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i] * w[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double nrm2sq_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void gemm_nt_sub_scalar(int m, int n, int k, const double* A, const double* B, double* C,
                        int ldc) {
  for (int j = 0; j < n; ++j) {
    const double* bj = B + std::size_t(j) * k;
    double* cj = C + std::size_t(j) * ldc;
    for (int i = 0; i < m; ++i) {
      const double* ai = A + std::size_t(i) * k;
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
      cj[i] -= acc;
    }
  }
}

void gemm_nt_acc_scalar(int m, int n, int k, const double* A, const double* B, double* C,
                        int ldc) {
  for (int j = 0; j < n; ++j) {
    const double* bj = B + std::size_t(j) * k;
    double* cj = C + std::size_t(j) * ldc;
    for (int i = 0; i < m; ++i) {
      const double* ai = A + std::size_t(i) * k;
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
      cj[i] += acc;
    }
  }
}

}  // namespace ordmed::kern::detail
