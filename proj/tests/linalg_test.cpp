#include "ordmed/linalg.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

using namespace ordmed::la;

namespace {

// Random symmetric positive definite A = B B^T + n I, column-major full.
std::vector<double> random_spd(std::mt19937_64& rng, int n) {
  std::vector<double> b(std::size_t(n) * n);
  for (auto& v : b) v = (double(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
  std::vector<double> a(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = i == j ? n : 0.0;
      for (int k = 0; k < n; ++k) acc += b[std::size_t(i) * n + k] * b[std::size_t(j) * n + k];
      a[std::size_t(j) * n + i] += acc;
    }
  return a;
}

std::vector<double> matvec(const std::vector<double>& a, const std::vector<double>& x, int n) {
  std::vector<double> y(n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) y[i] += a[std::size_t(j) * n + i] * x[j];
  return y;
}

}  // namespace

TEST_CASE("dense LDL solves SPD systems across panel boundaries") {
  std::mt19937_64 rng(11);
  for (int n : {1, 2, 5, 17, 64, 65, 150}) {
    auto a = random_spd(rng, n);
    const auto a_copy = a;
    std::vector<double> xref(n);
    for (auto& v : xref) v = (double(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
    auto rhs = matvec(a_copy, xref, n);

    DenseLDL ldl;
    ldl.factor(n, a, std::vector<std::int8_t>(n, 1), 1e-14);
    ldl.solve(rhs.data());
    for (int i = 0; i < n; ++i) CHECK(rhs[i] == doctest::Approx(xref[i]).epsilon(1e-9));
  }
}

TEST_CASE("dense LDL handles quasi-definite saddle systems") {
  // [ I  B^T ; B  -I ] with small B.
  const int m = 3, k = 2, n = m + k;
  std::vector<double> B = {1, 0, 2, -1, 0.5, 3};  // k x m row-major
  std::vector<double> a(std::size_t(n) * n, 0.0);
  for (int i = 0; i < m; ++i) a[std::size_t(i) * n + i] = 1.0;
  for (int i = 0; i < k; ++i) a[std::size_t(m + i) * n + (m + i)] = -1.0;
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < m; ++c) {
      a[std::size_t(c) * n + (m + r)] = B[std::size_t(r) * m + c];  // lower part
      a[std::size_t(m + r) * n + c] = B[std::size_t(r) * m + c];
    }
  const auto a_copy = a;
  std::vector<double> xref = {1, -2, 3, 0.5, -0.25};
  auto rhs = matvec(a_copy, xref, n);
  std::vector<std::int8_t> sign = {1, 1, 1, -1, -1};
  DenseLDL ldl;
  ldl.factor(n, a, sign, 1e-14);
  ldl.solve(rhs.data());
  for (int i = 0; i < n; ++i) CHECK(rhs[i] == doctest::Approx(xref[i]).epsilon(1e-10));
}

TEST_CASE("jacobi eigensolver matches hand values") {
  // [[2,1],[1,2]] -> eigenvalues 1, 3
  const double a2[] = {2, 1, 1, 2};
  double w[2], v[4];
  sym_eig(2, a2, w, v);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(3.0));

  // The rsoc_to_psd example matrix: a=3,b=2,c=5 gives 9 <= 10 and
  // [[7,0,6],[0,7,-3],[6,-3,7]] must be PSD.
  const double a3[] = {7, 0, 6, 0, 7, -3, 6, -3, 7};
  double w3[3], v3[9];
  sym_eig(3, a3, w3, v3);
  CHECK(w3[0] > 0.0);
  // residual check A v = w v for every pair
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i) {
      double av = 0.0;
      for (int j = 0; j < 3; ++j) av += a3[i * 3 + j] * v3[j * 3 + k];
      CHECK(av == doctest::Approx(w3[k] * v3[i * 3 + k]).epsilon(1e-10).scale(10));
    }
  CHECK(w3[0] + w3[1] + w3[2] == doctest::Approx(21.0));
}

TEST_CASE("node factorization equals dense on random sparse QD systems") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 30;
    std::vector<std::pair<int, int>> pattern;
    std::vector<double> offdiag;
    std::vector<double> diag(n);
    std::vector<std::int8_t> sign(n);
    std::vector<double> dense(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
      sign[i] = i < 20 ? 1 : -1;
      diag[i] = sign[i] * (5.0 + double(rng() % 10));
      dense[std::size_t(i) * n + i] = diag[i];
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng() % 100 < 15) {
          const double v = (double(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
          pattern.push_back({i, j});
          offdiag.push_back(v);
          dense[std::size_t(j) * n + i] = v;
          dense[std::size_t(i) * n + j] = v;
        }

    std::vector<double> xref(n);
    for (auto& v : xref) v = (double(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
    auto rhs = matvec(dense, xref, n);

    NodeLDL nf;
    nf.analyze(n, pattern, 8);
    nf.factor(diag, offdiag, sign, 1e-14);
    nf.solve(rhs);
    for (int i = 0; i < n; ++i) CHECK(rhs[i] == doctest::Approx(xref[i]).epsilon(1e-8).scale(1));

    // Refactor with scaled values reuses the analysis.
    std::vector<double> diag2(diag), off2(offdiag);
    for (auto& v : diag2) v *= 2.0;
    for (auto& v : off2) v *= 2.0;
    auto rhs2 = matvec(dense, xref, n);
    for (auto& v : rhs2) v *= 2.0;
    nf.factor(diag2, off2, sign, 1e-14);
    nf.solve(rhs2);
    for (int i = 0; i < n; ++i) CHECK(rhs2[i] == doctest::Approx(xref[i]).epsilon(1e-8).scale(1));
  }
}

TEST_CASE("node factorization eliminates low-degree chains fully") {
  // Path graph: every node degree <= 2, so no dense core at cap 8.
  const int n = 50;
  std::vector<std::pair<int, int>> pattern;
  std::vector<double> offdiag;
  for (int i = 0; i + 1 < n; ++i) {
    pattern.push_back({i, i + 1});
    offdiag.push_back(-1.0);
  }
  std::vector<double> diag(n, 4.0);
  NodeLDL nf;
  nf.analyze(n, pattern, 8);
  CHECK(nf.core_size() <= 2);
  nf.factor(diag, offdiag, std::vector<std::int8_t>(n, 1), 1e-14);
  std::vector<double> rhs(n, 1.0);
  auto b = rhs;
  nf.solve(rhs);
  // residual
  for (int i = 0; i < n; ++i) {
    double acc = 4.0 * rhs[i];
    if (i > 0) acc -= rhs[i - 1];
    if (i + 1 < n) acc -= rhs[i + 1];
    CHECK(acc == doctest::Approx(b[i]).epsilon(1e-12));
  }
}
