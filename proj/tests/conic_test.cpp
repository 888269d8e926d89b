#include "ordmed/conic.hpp"

#include <cmath>

#include "doctest.h"
#include "ordmed/errors.hpp"
#include "ordmed/reduce.hpp"

using namespace ordmed;
using namespace ordmed::co;

TEST_CASE("svec indexing is lower column-major with sqrt2 scaling") {
  CHECK(svec_dim(1) == 1);
  CHECK(svec_dim(3) == 6);
  CHECK(svec_index(3, 0, 0) == 0);
  CHECK(svec_index(3, 1, 0) == 1);
  CHECK(svec_index(3, 2, 0) == 2);
  CHECK(svec_index(3, 1, 1) == 3);
  CHECK(svec_index(3, 2, 1) == 4);
  CHECK(svec_index(3, 2, 2) == 5);

  const double m[] = {1, 2, 3, 2, 4, 5, 3, 5, 6};
  double v[6], back[9];
  mat_to_svec(m, v, 3);
  const double rt2 = std::sqrt(2.0);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 2.0 * rt2);
  CHECK(v[5] == 6.0);
  // svec dot = matrix inner product
  double sdot = 0.0, mdot = 0.0;
  for (double x : v) sdot += x * x;
  for (double x : m) mdot += x * x;
  CHECK(sdot == doctest::Approx(mdot));
  svec_to_mat(v, back, 3);
  for (int i = 0; i < 9; ++i) CHECK(back[i] == doctest::Approx(m[i]).epsilon(1e-15));
}

TEST_CASE("validate_program rejects malformed programs") {
  ConicProgram p;
  p.add_cols(ConeKind::free_, 2);
  p.add_cols(ConeKind::nonneg, 1);
  const int r = p.add_row(1.0);
  p.entry(r, 0, 1.0);
  CHECK_NOTHROW(validate_program(p));

  ConicProgram bad = p;
  bad.entry(0, 7, 1.0);
  CHECK_THROWS_AS(validate_program(bad), ValidationError);

  bad = p;
  bad.cones[1].offset = 5;
  CHECK_THROWS_AS(validate_program(bad), ValidationError);

  bad = p;
  bad.c.pop_back();
  CHECK_THROWS_AS(validate_program(bad), ValidationError);
}

TEST_CASE("reduce eliminates singleton cone columns into cone rows") {
  // min x s.t. x - s = 1, s >= 0  (the micro LP)
  ConicProgram p;
  const int x = p.add_cols(ConeKind::free_, 1);
  const int s = p.add_cols(ConeKind::nonneg, 1);
  p.obj(x, 1.0);
  const int r = p.add_row(1.0);
  p.entry(r, x, 1.0);
  p.entry(r, s, -1.0);

  ReducedForm rf = reduce(p);
  CHECK(rf.nx == 1);
  CHECK(rf.xcols[0] == x);
  CHECK(rf.neq == 0);
  CHECK(rf.nsrows == 1);
  REQUIRE(rf.rows.size() == 1);
  CHECK(rf.rows[0].kind == ConeKind::nonneg);
  // s = h - G x = -1 + x  >= 0
  CHECK(rf.h[0] == doctest::Approx(-1.0));
  REQUIRE(rf.G.size() == 1);
  CHECK(rf.G[0].val == doctest::Approx(-1.0));
  CHECK(rf.srow_col[0] == s);

  auto full = recover_primal(rf, {2.5}, {1.5});
  CHECK(full[0] == 2.5);
  CHECK(full[1] == 1.5);
}

TEST_CASE("reduce keeps multiply-used cone columns structural with identity rows") {
  // z >= 0 used in two rows stays structural.
  ConicProgram p;
  const int z = p.add_cols(ConeKind::nonneg, 1);
  const int f = p.add_cols(ConeKind::free_, 1);
  const int r1 = p.add_row(0.0);
  p.entry(r1, z, 1.0);
  p.entry(r1, f, 1.0);
  const int r2 = p.add_row(2.0);
  p.entry(r2, z, 1.0);
  p.entry(r2, f, -1.0);

  ReducedForm rf = reduce(p);
  CHECK(rf.nx == 2);
  CHECK(rf.neq == 2);
  CHECK(rf.nsrows == 1);
  CHECK(rf.srow_orig_row[0] == -1);  // appended identity row
  CHECK(rf.h[0] == 0.0);
  REQUIRE(rf.G.size() == 1);
  CHECK(rf.G[0].val == -1.0);
}

TEST_CASE("reduce folds eliminated objective coefficients") {
  // min s with x - s = 1: s = x - 1, so c = x - 1 => c0 = -1, c_x = 1.
  ConicProgram p;
  const int x = p.add_cols(ConeKind::free_, 1);
  const int s = p.add_cols(ConeKind::nonneg, 1);
  p.obj(s, 1.0);
  const int r = p.add_row(1.0);
  p.entry(r, x, 1.0);
  p.entry(r, s, -1.0);

  ReducedForm rf = reduce(p);
  CHECK(rf.nx == 1);
  CHECK(rf.c0 == doctest::Approx(-1.0));
  CHECK(rf.c[0] == doctest::Approx(1.0));
}

TEST_CASE("rsoc_to_psd emits the documented 3x3 block") {
  ConicProgram p;
  const int cone = p.add_cols(ConeKind::rsoc, 3);  // (p, q, r): 2pq >= r^2
  p.obj(cone, 1.0);

  ConicProgram q = rsoc_to_psd(p);
  CHECK(q.cones.size() == 3);  // freed rsoc columns, psd block, nonneg slack
  CHECK(q.cones[0].kind == ConeKind::free_);
  CHECK(q.cones[1].kind == ConeKind::psd);
  CHECK(q.cones[1].size == 3);
  CHECK(q.cones[2].kind == ConeKind::nonneg);
  CHECK(q.nrows == 7);  // six tying rows + the b+c >= 0 row

  // Instantiate b=2, c=5, a=3 (so rsoc holds: 2*2*5 >= (3*sqrt2)^2 = 18) and
  // check the tied matrix is the example [[7,0,6],[0,7,-3],[6,-3,7]].
  const double rt2 = std::sqrt(2.0);
  std::vector<double> u(q.ncols, 0.0);
  u[cone] = 2.0;
  u[cone + 1] = 5.0;
  u[cone + 2] = 3.0 * rt2;
  // solve tying rows for the svec entries: row k: svec_col + sum = 0
  const int sv = q.cones[1].offset;
  for (int row = 0; row < q.nrows; ++row) {
    double rhs = q.b[row], svcoef = 0.0;
    int svcol = -1;
    double acc = 0.0;
    for (const Triplet& t : q.A) {
      if (t.row != row) continue;
      if (t.col >= sv && t.col < sv + 6) {
        svcol = t.col;
        svcoef = t.val;
      } else {
        acc += t.val * u[t.col];
      }
    }
    if (svcol >= 0) u[svcol] = (rhs - acc) / svcoef;
  }
  double mat[9];
  svec_to_mat(u.data() + sv, mat, 3);
  const double want[9] = {7, 0, 6, 0, 7, -3, 6, -3, 7};
  for (int i = 0; i < 9; ++i) CHECK(mat[i] == doctest::Approx(want[i]).epsilon(1e-14));
}

TEST_CASE("rsoc_to_psd arrow embedding ties soc coordinates") {
  ConicProgram p;
  const int cone = p.add_cols(ConeKind::soc, 3);  // (t, x1, x2)
  ConicProgram q = rsoc_to_psd(p);
  CHECK(q.cones[0].kind == ConeKind::free_);
  CHECK(q.cones[1].kind == ConeKind::psd);
  CHECK(q.cones[1].size == 3);
  // t=5, x=(3,4): arrow [[5,3,4],[3,5,0],[4,0,5]] is PSD with det 0.
  std::vector<double> u(q.ncols, 0.0);
  u[cone] = 5.0;
  u[cone + 1] = 3.0;
  u[cone + 2] = 4.0;
  const int sv = q.cones[1].offset;
  for (int row = 0; row < q.nrows; ++row) {
    double rhs = q.b[row], svcoef = 0.0;
    int svcol = -1;
    double acc = 0.0;
    for (const Triplet& t : q.A) {
      if (t.row != row) continue;
      if (t.col >= sv) {
        svcol = t.col;
        svcoef = t.val;
      } else {
        acc += t.val * u[t.col];
      }
    }
    if (svcol >= 0) u[svcol] = (rhs - acc) / svcoef;
  }
  double mat[9];
  svec_to_mat(u.data() + sv, mat, 3);
  const double want[9] = {5, 3, 4, 3, 5, 0, 4, 0, 5};
  for (int i = 0; i < 9; ++i) CHECK(mat[i] == doctest::Approx(want[i]).epsilon(1e-14));
}
