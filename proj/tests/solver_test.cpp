#include "ordmed/solver.hpp"

#include <cmath>

#include "doctest.h"
#include "ordmed/conic.hpp"
#include "ordmed/errors.hpp"

using namespace ordmed;
using namespace ordmed::co;
using ordmed::so::SolverOptions;

namespace {

ConicProgram micro_lp() {
  // min x  s.t.  x - s = 1, s >= 0
  ConicProgram p;
  p.add_cols(ConeKind::free_, 1);
  p.add_cols(ConeKind::nonneg, 1);
  p.obj(0, 1.0);
  const int r = p.add_row(1.0);
  p.entry(r, 0, 1.0);
  p.entry(r, 1, -1.0);
  return p;
}

}  // namespace

TEST_CASE("options validation") {
  SolverOptions o;
  CHECK_NOTHROW(o.validate());
  o.gap_tol = 0.0;
  CHECK_THROWS_AS(o.validate(), ValidationError);
  o = {};
  o.max_iter = 0;
  CHECK_THROWS_AS(o.validate(), ValidationError);
}

TEST_CASE("micro LP solves to its vertex") {
  const SolveResult res = so::solve(micro_lp());
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.pobj == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.dobj == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.gap <= 1e-8);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-7));
  // dual: the equality multiplier is 1 and the slack carries zero cost
  CHECK(res.y[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("fully eliminated LP has no structural columns left") {
  // min u  s.t.  u = 1, u >= 0
  ConicProgram p;
  p.add_cols(ConeKind::nonneg, 1);
  p.obj(0, 1.0);
  const int r = p.add_row(1.0);
  p.entry(r, 0, 1.0);
  const SolveResult res = so::solve(p);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.pobj == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("equality-only program") {
  // min x  s.t.  x = 3
  ConicProgram p;
  p.add_cols(ConeKind::free_, 1);
  p.obj(0, 1.0);
  const int r = p.add_row(3.0);
  p.entry(r, 0, 1.0);
  const SolveResult res = so::solve(p);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.pobj == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(res.x[0] == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("two-variable LP with a tie-free vertex") {
  // min x + 2y  s.t.  x + y = 1, x, y >= 0
  ConicProgram p;
  p.add_cols(ConeKind::nonneg, 2);
  p.obj(0, 1.0);
  p.obj(1, 2.0);
  const int r = p.add_row(1.0);
  p.entry(r, 0, 1.0);
  p.entry(r, 1, 1.0);
  const SolveResult res = so::solve(p);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.pobj == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res.x[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
  // dual consistency against the original rows
  double by = 0.0;
  for (int i = 0; i < p.nrows; ++i) by += p.b[i] * res.y[i];
  CHECK(by + p.obj_const == doctest::Approx(res.dobj).epsilon(1e-9));
  CHECK(res.s[0] >= -1e-9);
  CHECK(res.s[1] >= -1e-9);
}

TEST_CASE("objective constant is carried through") {
  ConicProgram p = micro_lp();
  p.obj_const = 2.5;
  const SolveResult res = so::solve(p);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.pobj == doctest::Approx(3.5).epsilon(1e-8));
  CHECK(res.dobj == doctest::Approx(3.5).epsilon(1e-8));
}

TEST_CASE("second-order cone hits the 3-4-5 triangle") {
  // min t  s.t.  (t, q1, q2) in soc, q1 = 3, q2 = 4
  ConicProgram p;
  p.add_cols(ConeKind::soc, 3);
  p.obj(0, 1.0);
  int r = p.add_row(3.0);
  p.entry(r, 1, 1.0);
  r = p.add_row(4.0);
  p.entry(r, 2, 1.0);
  const SolveResult res = so::solve(p);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.pobj == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(res.gap <= 1e-8);
  CHECK(res.x[0] == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("soc with a free center column") {
  // min t  s.t.  (t, x - 3, x - 5) in soc: best x is 4, t = sqrt(2)
  ConicProgram p;
  p.add_cols(ConeKind::soc, 3);
  p.add_cols(ConeKind::free_, 1);
  p.obj(0, 1.0);
  int r = p.add_row(-3.0);
  p.entry(r, 1, 1.0);
  p.entry(r, 3, -1.0);
  r = p.add_row(-5.0);
  p.entry(r, 2, 1.0);
  p.entry(r, 3, -1.0);
  const SolveResult res = so::solve(p);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.pobj == doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));
  CHECK(res.x[3] == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("rotated cone program and its psd embedding agree") {
  // min p + q  s.t.  2 p q >= rr^2, rr = 2 sqrt(2)   (so p q >= 4)
  ConicProgram p;
  p.add_cols(ConeKind::rsoc, 3);
  p.obj(0, 1.0);
  p.obj(1, 1.0);
  const int r = p.add_row(2.0 * std::sqrt(2.0));
  p.entry(r, 2, 1.0);
  const SolveResult res = so::solve(p);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.pobj == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(res.x[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(res.x[1] == doctest::Approx(2.0).epsilon(1e-6));

  const ConicProgram q = rsoc_to_psd(p);
  const SolveResult res2 = so::solve(q);
  REQUIRE(res2.status == SolveStatus::optimal);
  CHECK(std::abs(res2.pobj - res.pobj) <= 1e-7 * std::max(1.0, std::abs(res.pobj)));
}

TEST_CASE("psd trace program on the dense path") {
  // min tr(X)  s.t.  X_11 = 1, X psd 2x2
  ConicProgram p;
  p.add_cols(ConeKind::psd, 2);
  p.obj(0, 1.0);
  p.obj(2, 1.0);
  const int r = p.add_row(1.0);
  p.entry(r, 0, 1.0);
  const SolveResult res = so::solve(p);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.pobj == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(res.x[2]) <= 1e-6);
}

TEST_CASE("psd program recovers the minimum eigenvalue") {
  // min <C, X>  s.t.  tr(X) = 1, X psd 2x2, C = [[2, 1], [1, 0]]
  ConicProgram p;
  p.add_cols(ConeKind::psd, 2);
  p.obj(0, 2.0);
  p.obj(1, std::sqrt(2.0));
  p.obj(2, 0.0);
  const int r = p.add_row(1.0);
  p.entry(r, 0, 1.0);
  p.entry(r, 2, 1.0);
  const SolveResult res = so::solve(p);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.pobj == doctest::Approx(1.0 - std::sqrt(2.0)).epsilon(1e-7));
  CHECK(res.dobj == doctest::Approx(1.0 - std::sqrt(2.0)).epsilon(1e-7));
}

TEST_CASE("infeasible box is certified") {
  // x >= 1 and x <= 0
  ConicProgram p;
  p.add_cols(ConeKind::free_, 1);
  p.add_cols(ConeKind::nonneg, 2);
  int r = p.add_row(1.0);
  p.entry(r, 0, 1.0);
  p.entry(r, 1, -1.0);
  r = p.add_row(0.0);
  p.entry(r, 0, 1.0);
  p.entry(r, 2, 1.0);
  const SolveResult res = so::solve(p);
  REQUIRE(res.status == SolveStatus::primal_infeasible);
  // Farkas certificate: A'y supported on the cone duals, b'y = 1
  double by = 0.0;
  for (int i = 0; i < p.nrows; ++i) by += p.b[i] * res.y[i];
  CHECK(by == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("unbounded objective is certified") {
  // min -x  s.t.  x >= 0
  ConicProgram p;
  p.add_cols(ConeKind::nonneg, 1);
  p.obj(0, -1.0);
  const SolveResult res = so::solve(p);
  REQUIRE(res.status == SolveStatus::dual_infeasible);
  double cx = 0.0;
  for (int j = 0; j < p.ncols; ++j) cx += p.c[j] * res.x[j];
  CHECK(cx == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(res.x[0] >= 0.0);
}

TEST_CASE("iteration cap reports max_iter with the best iterate") {
  SolverOptions opts;
  opts.max_iter = 1;
  const SolveResult res = so::solve(micro_lp(), opts);
  CHECK(res.status == SolveStatus::max_iter);
  CHECK(!res.note.empty());
}

TEST_CASE("solves are deterministic") {
  const SolveResult a = so::solve(micro_lp());
  const SolveResult b = so::solve(micro_lp());
  CHECK(a.iters == b.iters);
  CHECK(a.pobj == b.pobj);
  CHECK(a.x[0] == b.x[0]);
}
