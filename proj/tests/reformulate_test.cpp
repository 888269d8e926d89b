#include "ordmed/reformulate.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "ordmed/errors.hpp"
#include "ordmed/instance.hpp"
#include "ordmed/solver.hpp"

using namespace ordmed;
using ordmed::rf::BuiltProgram;

namespace {

Instance line_instance(std::vector<double> lambda, RationalNorm norm) {
  Instance inst;
  inst.d = 1;
  inst.points = {{0.0}, {1.0}, {3.0}};
  inst.omega = {1.0, 1.0, 1.0};
  inst.lambda = std::move(lambda);
  inst.norm = norm;
  return inst;
}

double solve_value(const BuiltProgram& bp, const Instance& inst, double* discrepancy = nullptr) {
  const co::SolveResult res = so::solve(bp.prog);
  REQUIRE(res.status == co::SolveStatus::optimal);
  const so::LocationSolution ls = so::recover_location(res, bp.vars, inst);
  if (discrepancy) *discrepancy = ls.discrepancy;
  return ls.program_value;
}

}  // namespace

TEST_CASE("ordered_value sorts nonincreasingly with index ties") {
  Instance inst = line_instance({3.0, 2.0, 1.0}, RationalNorm(1, 1));
  // distances at 0.5: (0.5, 0.5, 2.5); sorted desc with stable ties: 2.5, 0.5, 0.5
  CHECK(rf::ordered_value(inst, {0.5}) == doctest::Approx(3 * 2.5 + 2 * 0.5 + 1 * 0.5));
  CHECK_THROWS_AS(rf::ordered_value(inst, {0.5, 0.5}), ValidationError);
}

TEST_CASE("linear constraint count is n^2 + n(2d + 1)") {
  for (const auto& [n, d] : {std::pair{4, 2}, std::pair{7, 3}, std::pair{10, 1}}) {
    const Instance inst = generate(n, d, /*seed=*/42 + n, /*box_hi=*/5.0,
                                   LambdaPreset{LambdaPreset::Kind::weber, 0, 0},
                                   RationalNorm(3, 2));
    const BuiltProgram bp = rf::build_ordered(inst);
    CHECK(bp.report.linear_constraints == n * n + n * (2 * d + 1));
    CHECK(bp.report.rsoc_cones > 0);
    CHECK(bp.report.tie_rows == 3 * bp.report.rsoc_cones);
  }
}

TEST_CASE("weber on a line matches the median") {
  // min sum |x - a_i| over {0, 1, 3} is 3 at the median point
  Instance inst = line_instance({1.0, 1.0, 1.0}, RationalNorm(1, 1));
  CHECK(solve_value(rf::build_l1(inst), inst) == doctest::Approx(3.0).epsilon(1e-7));

  inst.norm = RationalNorm(2, 1);
  CHECK(solve_value(rf::build_l2(inst), inst) == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(solve_value(rf::build_ordered(inst), inst) == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(solve_value(rf::build_ksum(inst), inst) == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("center on a line is the midpoint radius") {
  Instance inst = line_instance({1.0, 0.0, 0.0}, RationalNorm(2, 1));
  CHECK(solve_value(rf::build_l2(inst), inst) == doctest::Approx(1.5).epsilon(1e-7));
  CHECK(solve_value(rf::build_ordered(inst), inst) == doctest::Approx(1.5).epsilon(1e-7));
  CHECK(solve_value(rf::build_ksum(inst), inst) == doctest::Approx(1.5).epsilon(1e-7));
}

TEST_CASE("2-centrum on a line") {
  // sum of the two largest of (|x|, |x-1|, |x-3|) bottoms out at 3
  Instance inst = line_instance({1.0, 1.0, 0.0}, RationalNorm(2, 1));
  CHECK(solve_value(rf::build_ordered(inst), inst) == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(solve_value(rf::build_ksum(inst), inst) == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("ordered and level-sum models agree on random instances") {
  for (const auto& norm : {RationalNorm(3, 2), RationalNorm(3, 1), RationalNorm(7, 2)}) {
    const Instance inst = generate(6, 2, /*seed=*/7 + norm.r, /*box_hi=*/4.0,
                                   LambdaPreset{LambdaPreset::Kind::random_monotone, 0, 99},
                                   norm, /*random_omega=*/true);
    double disc_a = 0.0, disc_b = 0.0;
    const double va = solve_value(rf::build_ordered(inst), inst, &disc_a);
    const double vb = solve_value(rf::build_ksum(inst), inst, &disc_b);
    CHECK(std::abs(va - vb) <= 1e-7 * std::max(1.0, std::abs(va)));
    CHECK(disc_a <= 1e-6 * std::max(1.0, std::abs(va)));
    CHECK(disc_b <= 1e-6 * std::max(1.0, std::abs(vb)));
  }
}

TEST_CASE("power model at exponent 2 matches the direct cone model") {
  const Instance inst = generate(5, 3, /*seed=*/11, /*box_hi=*/3.0,
                                 LambdaPreset{LambdaPreset::Kind::kcentrum, 2, 0},
                                 RationalNorm(2, 1));
  const double va = solve_value(rf::build_ordered(inst), inst);
  const double vb = solve_value(rf::build_l2(inst), inst);
  const double vc = solve_value(rf::build_ksum(inst), inst);
  CHECK(va == doctest::Approx(vb).epsilon(1e-7));
  CHECK(vc == doctest::Approx(vb).epsilon(1e-7));
}

TEST_CASE("translation invariance of the solved objective") {
  Instance inst = generate(5, 2, /*seed=*/21, /*box_hi=*/3.0,
                           LambdaPreset{LambdaPreset::Kind::random_monotone, 0, 5},
                           RationalNorm(3, 2));
  const double va = solve_value(rf::build_ordered(inst), inst);
  Instance shifted = inst;
  for (auto& pt : shifted.points) {
    pt[0] += 10.0;
    pt[1] -= 4.0;
  }
  const double vb = solve_value(rf::build_ordered(shifted), shifted);
  CHECK(va == doctest::Approx(vb).epsilon(1e-7));
}

TEST_CASE("builders reject what they cannot certify") {
  Instance inst = line_instance({1.0, 2.0, 3.0}, RationalNorm(3, 2));  // increasing
  CHECK_THROWS_AS(rf::build_ordered(inst), ValidationError);

  inst = line_instance({1.0, 0.0, -1.0}, RationalNorm(3, 2));  // range weights
  CHECK_THROWS_AS(rf::build_ordered(inst), ValidationError);
  CHECK_THROWS_AS(rf::build_ksum(inst), ValidationError);

  inst = line_instance({1.0, 1.0, 1.0}, RationalNorm(1, 1));
  CHECK_THROWS_AS(rf::build_ordered(inst), ValidationError);  // use build_l1
  CHECK_THROWS_AS(rf::build_l2(inst), ValidationError);

  inst.norm = RationalNorm(3, 1);
  CHECK_THROWS_AS(rf::build_l1(inst), ValidationError);
}

TEST_CASE("zero weight silences a point") {
  Instance inst = line_instance({1.0, 1.0, 1.0}, RationalNorm(3, 2));
  inst.omega[2] = 0.0;  // the point at 3 no longer matters
  // weber over {0, 1}: any x in [0, 1] gives 1
  CHECK(solve_value(rf::build_ordered(inst), inst) == doctest::Approx(1.0).epsilon(1e-6));
}
