#include "ordmed/kernels.hpp"

namespace ordmed::kern {

namespace detail {
double dot_scalar(const double*, const double*, std::size_t);
double wdot_scalar(const double*, const double*, const double*, std::size_t);
void axpy_scalar(double, const double*, double*, std::size_t);
void scal_scalar(double, double*, std::size_t);
double nrm2sq_scalar(const double*, std::size_t);
void gemm_nt_sub_scalar(int, int, int, const double*, const double*, double*, int);
void gemm_nt_acc_scalar(int, int, int, const double*, const double*, double*, int);
#if ORDMED_WITH_AVX2
double dot_avx2(const double*, const double*, std::size_t);
double wdot_avx2(const double*, const double*, const double*, std::size_t);
void axpy_avx2(double, const double*, double*, std::size_t);
void scal_avx2(double, double*, std::size_t);
double nrm2sq_avx2(const double*, std::size_t);
void gemm_nt_sub_avx2(int, int, int, const double*, const double*, double*, int);
void gemm_nt_acc_avx2(int, int, int, const double*, const double*, double*, int);
#endif
}  // namespace detail

namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  double (*wdot)(const double*, const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scal)(double, double*, std::size_t);
  double (*nrm2sq)(const double*, std::size_t);
  void (*gemm_nt_sub)(int, int, int, const double*, const double*, double*, int);
  void (*gemm_nt_acc)(int, int, int, const double*, const double*, double*, int);
  Backend which;
};

constexpr Table kScalar{detail::dot_scalar,    detail::wdot_scalar,
                        detail::axpy_scalar,   detail::scal_scalar,
                        detail::nrm2sq_scalar, detail::gemm_nt_sub_scalar,
                        detail::gemm_nt_acc_scalar, Backend::scalar};
#if ORDMED_WITH_AVX2
constexpr Table kAvx2{detail::dot_avx2,    detail::wdot_avx2,       detail::axpy_avx2,
                      detail::scal_avx2,   detail::nrm2sq_avx2,     detail::gemm_nt_sub_avx2,
                      detail::gemm_nt_acc_avx2, Backend::avx2};
#endif

const Table* pick_default() {
#if ORDMED_WITH_AVX2
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2;
#endif
  return &kScalar;
}

const Table*& table() {
  static const Table* t = pick_default();
  return t;
}

}  // namespace

Backend active_backend() { return table()->which; }

bool avx2_available() {
#if ORDMED_WITH_AVX2
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool set_backend(Backend b) {
  if (b == Backend::scalar) {
    table() = &kScalar;
    return true;
  }
#if ORDMED_WITH_AVX2
  if (b == Backend::avx2 && avx2_available()) {
    table() = &kAvx2;
    return true;
  }
#endif
  return false;
}

double dot(const double* x, const double* y, std::size_t n) { return table()->dot(x, y, n); }
double wdot(const double* x, const double* y, const double* w, std::size_t n) {
  return table()->wdot(x, y, w, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) { table()->axpy(a, x, y, n); }
void scal(double a, double* x, std::size_t n) { table()->scal(a, x, n); }
double nrm2sq(const double* x, std::size_t n) { return table()->nrm2sq(x, n); }
void gemm_nt_sub(int m, int n, int k, const double* A, const double* B, double* C, int ldc) {
  table()->gemm_nt_sub(m, n, k, A, B, C, ldc);
}
void gemm_nt_acc(int m, int n, int k, const double* A, const double* B, double* C, int ldc) {
  table()->gemm_nt_acc(m, n, k, A, B, C, ldc);
}

}  // namespace ordmed::kern
