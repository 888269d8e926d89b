#include "ordmed/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "ordmed/errors.hpp"
#include "ordmed/instance.hpp"
#include "ordmed/reformulate.hpp"
#include "ordmed/solver.hpp"

using namespace ordmed;

namespace {

Instance make_instance(std::vector<std::vector<double>> pts, std::vector<double> lambda,
                       RationalNorm norm, std::vector<double> omega = {}) {
  Instance inst;
  inst.d = static_cast<int>(pts.front().size());
  inst.points = std::move(pts);
  if (omega.empty()) omega.assign(inst.points.size(), 1.0);
  inst.omega = std::move(omega);
  inst.lambda = std::move(lambda);
  inst.norm = norm;
  return inst;
}

so::LocationSolution solve_location(const Instance& inst) {
  const rf::BuiltProgram bp = rf::build_ksum(inst);
  const co::SolveResult res = so::solve(bp.prog);
  REQUIRE(res.status == co::SolveStatus::optimal);
  return so::recover_location(res, bp.vars, inst);
}

}  // namespace

TEST_CASE("objective evaluates the sorted weighted sum") {
  // single point: zero at the point itself
  const Instance one = make_instance({{2.0, -1.0}}, {1.0}, RationalNorm(2, 1));
  CHECK(orc::objective(one, {2.0, -1.0}) == 0.0);

  const Instance pair = make_instance({{0.0}, {2.0}}, {1.0, 1.0}, RationalNorm(2, 1));
  CHECK(orc::objective(pair, {1.0}) == doctest::Approx(2.0));

  // distances (3, 1, 2) paired with lambda (2, 1, 0) after sorting: 2*3 + 1*2
  const Instance tri = make_instance({{3.0}, {-1.0}, {2.0}}, {2.0, 1.0, 0.0}, RationalNorm(2, 1));
  CHECK(orc::objective(tri, {0.0}) == doctest::Approx(8.0));

  CHECK_THROWS_AS(orc::objective(tri, {0.0, 0.0}), ValidationError);
}

TEST_CASE("objective matches the builder-side evaluator on random instances") {
  for (const auto& norm :
       {RationalNorm(1, 1), RationalNorm(3, 2), RationalNorm(2, 1), RationalNorm(7, 2)}) {
    const Instance inst = generate(9, 3, /*seed=*/31 + norm.r, /*box_hi=*/5.0,
                                   LambdaPreset{LambdaPreset::Kind::random_monotone, 0, 77},
                                   norm, /*random_omega=*/true);
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> unif(-6.0, 6.0);
    for (int trial = 0; trial < 50; ++trial) {
      const std::vector<double> x = {unif(rng), unif(rng), unif(rng)};
      const double a = orc::objective(inst, x);
      const double b = rf::ordered_value(inst, x);
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
  }
}

TEST_CASE("objective is permutation invariant and translation equivariant") {
  const Instance inst = generate(8, 2, /*seed=*/55, /*box_hi=*/4.0,
                                 LambdaPreset{LambdaPreset::Kind::random_monotone, 0, 13},
                                 RationalNorm(3, 2), /*random_omega=*/true);
  Instance perm = inst;
  // rotate points, weights stay attached to their points
  std::rotate(perm.points.begin(), perm.points.begin() + 3, perm.points.end());
  std::rotate(perm.omega.begin(), perm.omega.begin() + 3, perm.omega.end());
  Instance shift = inst;
  for (auto& p : shift.points) {
    p[0] += 2.5;
    p[1] -= 7.0;
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::vector<double> x = {unif(rng), unif(rng)};
    const double base = orc::objective(inst, x);
    CHECK(orc::objective(perm, x) == doctest::Approx(base).epsilon(1e-12));
    CHECK(orc::objective(shift, {x[0] + 2.5, x[1] - 7.0}) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("sorted objective equals the assignment dual lp") {
  // v_i + w_k >= lambda_k z_i linearizes the sorted dot; the lp optimum must
  // reproduce it for monotone lambda.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = 6;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<double> z(n), lambda(n);
    for (auto& v : z) v = 10.0 * unif(rng);
    for (auto& v : lambda) v = unif(rng);
    if (trial % 3 == 0) lambda[n - 1] = 0.0;
    std::sort(lambda.rbegin(), lambda.rend());

    co::ConicProgram prog;
    const int v0 = prog.add_cols(co::ConeKind::free_, n);
    const int w0 = prog.add_cols(co::ConeKind::free_, n);
    const int s0 = prog.add_cols(co::ConeKind::nonneg, n * n);
    for (int i = 0; i < n; ++i) {
      prog.obj(v0 + i, 1.0);
      prog.obj(w0 + i, 1.0);
    }
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const int row = prog.add_row(lambda[k] * z[i]);
        prog.entry(row, v0 + i, 1.0);
        prog.entry(row, w0 + k, 1.0);
        prog.entry(row, s0 + i * n + k, -1.0);
      }
    const co::SolveResult res = so::solve(prog);
    REQUIRE(res.status == co::SolveStatus::optimal);

    std::vector<double> zs = z;
    std::sort(zs.rbegin(), zs.rend());
    const double direct = std::inner_product(zs.begin(), zs.end(), lambda.begin(), 0.0);
    CHECK(std::abs(res.pobj - direct) <= 1e-9 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("weiszfeld solves the classics") {
  // two points: every segment point is optimal, value is the separation
  const Instance pair = make_instance({{0.0, 0.0}, {2.0, 0.0}}, {1.0, 1.0}, RationalNorm(2, 1));
  const orc::OracleReport two = orc::weiszfeld(pair);
  CHECK(two.value == doctest::Approx(2.0).epsilon(1e-10));

  const double h = std::sqrt(3.0) / 2.0;
  const Instance tri = make_instance({{0.0, 0.0}, {1.0, 0.0}, {0.5, h}}, {1.0, 1.0, 1.0},
                                     RationalNorm(2, 1));
  const orc::OracleReport eq = orc::weiszfeld(tri);
  CHECK(eq.value == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
  CHECK(eq.point[0] == doctest::Approx(0.5).epsilon(1e-8));

  const Instance right = make_instance({{0.0, 0.0}, {4.0, 0.0}, {0.0, 4.0}}, {1.0, 1.0, 1.0},
                                       RationalNorm(2, 1));
  const orc::OracleReport wz = orc::weiszfeld(right);
  const orc::OracleReport gr = orc::grid_refine(right);
  CHECK(wz.value == doctest::Approx(gr.value).epsilon(1e-6));
}

TEST_CASE("weiszfeld vertex test settles on a dominant demand point") {
  // omega_1 outweighs the combined pull of the rest, so a_1 is optimal
  const Instance inst = make_instance({{0.0}, {4.0}, {5.0}}, {1.0, 1.0, 1.0}, RationalNorm(2, 1),
                                      {10.0, 1.0, 1.0});
  const orc::OracleReport rep = orc::weiszfeld(inst);
  CHECK(rep.value == doctest::Approx(9.0).epsilon(1e-9));
  CHECK(std::abs(rep.point[0]) <= 1e-9);
}

TEST_CASE("weiszfeld rejects instances outside its contract") {
  const Instance wrong_norm = make_instance({{0.0}, {1.0}}, {1.0, 1.0}, RationalNorm(3, 2));
  CHECK_THROWS_AS(orc::weiszfeld(wrong_norm), ValidationError);
  const Instance wrong_lambda = make_instance({{0.0}, {1.0}}, {1.0, 0.0}, RationalNorm(2, 1));
  CHECK_THROWS_AS(orc::weiszfeld(wrong_lambda), ValidationError);
}

TEST_CASE("weiszfeld iteration descends monotonically") {
  const Instance inst = generate(12, 2, /*seed=*/83, /*box_hi=*/5.0,
                                 LambdaPreset{LambdaPreset::Kind::weber, 0, 0},
                                 RationalNorm(2, 1), /*random_omega=*/true);
  // replay the fixed-point map from an off-center start and watch the value
  std::vector<double> x = {4.9, -4.7};
  double prev = orc::objective(inst, x);
  for (int it = 0; it < 40; ++it) {
    std::vector<double> num(2, 0.0);
    double den = 0.0;
    for (int i = 0; i < inst.n(); ++i) {
      const double dx = x[0] - inst.points[i][0], dy = x[1] - inst.points[i][1];
      const double w = inst.omega[i] / std::sqrt(dx * dx + dy * dy);
      den += w;
      num[0] += w * inst.points[i][0];
      num[1] += w * inst.points[i][1];
    }
    x = {num[0] / den, num[1] / den};
    const double cur = orc::objective(inst, x);
    CHECK(cur <= prev * (1.0 + 1e-12) + 1e-12);
    prev = cur;
  }
}

TEST_CASE("subgradient descent collapses to the single demand point") {
  const Instance one = make_instance({{3.0, -4.0}}, {1.0}, RationalNorm(3, 2));
  const orc::OracleReport rep = orc::subgradient_solve(one, 5, 1);
  CHECK(rep.point[0] == 3.0);
  CHECK(rep.point[1] == -4.0);
  CHECK(rep.value == 0.0);
}

TEST_CASE("subgradient descent finds the midpoint of a center instance") {
  const Instance inst = make_instance({{0.0}, {2.0}}, {1.0, 0.0}, RationalNorm(2, 1));
  const orc::OracleReport rep = orc::subgradient_solve(inst);
  CHECK(std::abs(rep.value - 1.0) <= 1e-4);
}

TEST_CASE("subgradient descent tracks weiszfeld on a smooth weber instance") {
  const Instance inst = generate(50, 2, /*seed=*/19, /*box_hi=*/10.0,
                                 LambdaPreset{LambdaPreset::Kind::weber, 0, 0},
                                 RationalNorm(2, 1), /*random_omega=*/true);
  const orc::OracleReport wz = orc::weiszfeld(inst);
  const orc::OracleReport sg = orc::subgradient_solve(inst);
  CHECK(std::abs(sg.value - wz.value) <= 1e-5 * std::max(1.0, std::abs(wz.value)));
  CHECK(sg.value >= wz.value - 1e-9);  // upper-bound oracle
}

TEST_CASE("subgradient descent rejects non-monotone weights") {
  const Instance inst = make_instance({{0.0}, {1.0}}, {1.0, -1.0}, RationalNorm(2, 1));
  CHECK_THROWS_AS(orc::subgradient_solve(inst), ValidationError);
}

TEST_CASE("grid refinement pins down line and diagonal centers") {
  const Instance line = make_instance({{0.0}, {2.0}}, {1.0, 0.0}, RationalNorm(2, 1));
  const orc::OracleReport a = orc::grid_refine(line);
  CHECK(std::abs(a.value - 1.0) <= 1e-6);

  const Instance diag = make_instance({{0.0, 0.0}, {1.0, 1.0}}, {1.0, 0.0}, RationalNorm(1, 1));
  const orc::OracleReport b = orc::grid_refine(diag);
  CHECK(b.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(b.value >= 1.0 - 1e-12);  // upper bound: the true optimum is exactly 1
}

TEST_CASE("grid refinement respects region constraints") {
  Instance inst = make_instance({{0.0, 0.0}, {1.0, 1.0}}, {1.0, 0.0}, RationalNorm(2, 1));
  Polynomial half;  // x_1 - 0.6 >= 0
  half.terms.push_back({{1, 0}, 1.0});
  half.terms.push_back({{0, 0}, -0.6});
  inst.region = {half};
  const orc::OracleReport rep = orc::grid_refine(inst, {0.0, 0.0}, {1.0, 1.0}, 6);
  CHECK(rep.point[0] >= 0.6 - 1e-12);
  // center of {(0,0),(1,1)} restricted to x_1 >= 0.6: the distances equalize
  // at (0.6, 0.4), giving sqrt(0.36 + 0.16)
  const double expect = std::sqrt(0.52);
  CHECK(rep.value == doctest::Approx(expect).epsilon(1e-5));

  Polynomial far;  // x_1 - 9 >= 0 never holds inside the box
  far.terms.push_back({{1, 0}, 1.0});
  far.terms.push_back({{0, 0}, -9.0});
  inst.region = {far};
  CHECK_THROWS_AS(orc::grid_refine(inst, {0.0, 0.0}, {1.0, 1.0}, 3), VerifyError);
}

TEST_CASE("grid refinement rejects what it cannot search") {
  Instance inst = make_instance({{0.0, 0.0, 0.0, 0.0}}, {1.0}, RationalNorm(2, 1));
  CHECK_THROWS_AS(orc::grid_refine(inst), ValidationError);
  const Instance line = make_instance({{0.0}, {2.0}}, {1.0, 1.0}, RationalNorm(2, 1));
  CHECK_THROWS_AS(orc::grid_refine(line, {1.0}, {0.0}, 3), ValidationError);
  CHECK_THROWS_AS(orc::grid_refine(line, {0.0}, {2.0}, 0), ValidationError);
}

TEST_CASE("grid value stays above the conic optimum") {
  for (const auto& norm : {RationalNorm(3, 2), RationalNorm(2, 1), RationalNorm(3, 1)}) {
    const Instance inst = generate(8, 2, /*seed=*/61 + norm.r, /*box_hi=*/4.0,
                                   LambdaPreset{LambdaPreset::Kind::random_monotone, 0, 5},
                                   norm, /*random_omega=*/true);
    const so::LocationSolution sol = solve_location(inst);
    const orc::OracleReport grid = orc::grid_refine(inst);
    CHECK(grid.value >= sol.program_value - 1e-6 * std::max(1.0, std::abs(sol.program_value)));
  }
}

TEST_CASE("cross check passes the oracle point and fails a spoiled one") {
  const Instance inst = generate(10, 2, /*seed=*/23, /*box_hi=*/5.0,
                                 LambdaPreset{LambdaPreset::Kind::kcentrum, 5, 0},
                                 RationalNorm(2, 1));
  const orc::OracleReport ref = orc::grid_refine(inst);
  so::LocationSolution cand;
  cand.x = ref.point;
  const orc::OracleReport ok = orc::cross_check(inst, cand, 1e-6);
  CHECK(ok.pass);
  CHECK(ok.gap <= 1e-9);

  // walk away until the objective is off by ten percent
  so::LocationSolution bad = cand;
  while (orc::objective(inst, bad.x) < 1.1 * ref.value) bad.x[0] += 0.25;
  const orc::OracleReport fail = orc::cross_check(inst, bad, 1e-6);
  CHECK(!fail.pass);
  CHECK(fail.gap > 0.05);
}

TEST_CASE("cross check validates a conic weber solve end to end") {
  const Instance inst = generate(100, 2, /*seed=*/3, /*box_hi=*/10.0,
                                 LambdaPreset{LambdaPreset::Kind::weber, 0, 0},
                                 RationalNorm(3, 2));
  const so::LocationSolution sol = solve_location(inst);
  const orc::OracleReport rep = orc::cross_check(inst, sol, 1e-5);
  CHECK(rep.pass);
  CHECK(rep.method == "grid");

  // coarse sanity bound only: near demand points the tau = 3/2 gradient is
  // merely Hoelder continuous, so the subgradient oracle converges slowly here
  const orc::OracleReport sg = orc::subgradient_solve(inst);
  CHECK(sg.value >= sol.program_value - 1e-7 * std::max(1.0, sol.program_value));
  CHECK(std::abs(sg.value - sol.program_value) <=
        2e-3 * std::max(1.0, std::abs(sol.program_value)));
}

TEST_CASE("cross check picks weiszfeld when it applies") {
  const Instance inst = generate(20, 3, /*seed=*/47, /*box_hi=*/5.0,
                                 LambdaPreset{LambdaPreset::Kind::weber, 0, 0},
                                 RationalNorm(2, 1), /*random_omega=*/true);
  const so::LocationSolution sol = solve_location(inst);
  const orc::OracleReport rep = orc::cross_check(inst, sol, 1e-6);
  CHECK(rep.method == "weiszfeld");
  CHECK(rep.pass);
}

TEST_CASE("cross check refuses constrained instances") {
  Instance inst = make_instance({{0.0, 0.0}, {1.0, 1.0}}, {1.0, 0.0}, RationalNorm(2, 1));
  Polynomial g;
  g.terms.push_back({{1, 0}, 1.0});
  inst.region = {g};
  so::LocationSolution cand;
  cand.x = {0.5, 0.5};
  CHECK_THROWS_AS(orc::cross_check(inst, cand, 1e-6), VerifyError);
}
