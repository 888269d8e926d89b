#include "ordmed/instance.hpp"

#include <cmath>

#include "doctest.h"
#include "ordmed/errors.hpp"

using namespace ordmed;

TEST_CASE("lambda presets materialize as documented") {
  LambdaPreset weber{LambdaPreset::Kind::weber, 0, 0};
  CHECK(weber.make(4) == std::vector<double>{1, 1, 1, 1});

  LambdaPreset center{LambdaPreset::Kind::center, 0, 0};
  CHECK(center.make(4) == std::vector<double>{1, 0, 0, 0});

  LambdaPreset kc{LambdaPreset::Kind::kcentrum, 2, 0};
  CHECK(kc.make(4) == std::vector<double>{1, 1, 0, 0});
  CHECK_THROWS_AS(kc.make(1), ValidationError);

  LambdaPreset range{LambdaPreset::Kind::range, 0, 0};
  CHECK(range.make(4) == std::vector<double>{1, 0, 0, -1});
  CHECK(range.make(1) == std::vector<double>{1});

  LambdaPreset rm{LambdaPreset::Kind::random_monotone, 0, 42};
  auto l = rm.make(16);
  CHECK(l == rm.make(16));  // deterministic in the seed
  for (std::size_t i = 0; i + 1 < l.size(); ++i) CHECK(l[i] >= l[i + 1]);
  for (double v : l) {
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("preset parsing round-trips") {
  CHECK(parse_preset("weber").str() == "weber");
  CHECK(parse_preset("kcentrum:5").str() == "kcentrum:5");
  CHECK(parse_preset("random-monotone:9").str() == "random-monotone:9");
  CHECK(parse_preset("range").kind == LambdaPreset::Kind::range);
  CHECK_THROWS_AS(parse_preset("median"), ParseError);
  CHECK_THROWS_AS(parse_preset("kcentrum"), ParseError);
}

TEST_CASE("validate flags the hierarchy-only weight patterns") {
  LambdaPreset weber{LambdaPreset::Kind::weber, 0, 0};
  Instance inst = generate(5, 2, 7, 10.0, weber, RationalNorm(2, 1));
  ValidationReport rep = validate(inst);
  CHECK(rep.convex_pipeline());
  CHECK(!rep.hierarchy_only());
  CHECK(rep.norm_power_ok);

  inst.lambda = {1, 0, 0, 0, -1};  // range weights
  rep = validate(inst);
  CHECK(rep.lambda_monotone);
  CHECK(!rep.lambda_nonneg);
  CHECK(rep.hierarchy_only());

  inst.lambda = {0, 1, 0, 0, 0};
  rep = validate(inst);
  CHECK(!rep.lambda_monotone);
  CHECK(rep.hierarchy_only());

  inst.lambda.pop_back();
  CHECK_THROWS_AS(validate(inst), ValidationError);
}

TEST_CASE("generate is deterministic and respects the box") {
  LambdaPreset weber{LambdaPreset::Kind::weber, 0, 0};
  Instance a = generate(20, 3, 123, 5.0, weber, RationalNorm(3, 2));
  Instance b = generate(20, 3, 123, 5.0, weber, RationalNorm(3, 2));
  CHECK(a == b);
  CHECK(a.n() == 20);
  CHECK(a.d == 3);
  CHECK(a.box_hi() <= 5.0);
  CHECK(a.box_hi() > 0.0);
  for (const auto& p : a.points)
    for (double c : p) {
      CHECK(c >= 0.0);
      CHECK(c < 5.0);
    }

  Instance c = generate(20, 3, 124, 5.0, weber, RationalNorm(3, 2));
  CHECK(!(a == c));

  Instance w = generate(8, 2, 9, 1.0, weber, RationalNorm(2, 1), true);
  for (double v : w.omega) {
    CHECK(v >= 0.5);
    CHECK(v < 1.5);
  }
}

TEST_CASE("save/load round-trips instances exactly") {
  LambdaPreset rm{LambdaPreset::Kind::random_monotone, 0, 77};
  Instance inst = generate(6, 3, 55, 4.0, rm, RationalNorm(7, 2), true);
  Polynomial g;
  g.terms.push_back({{2, 0, 0}, 1.0});
  g.terms.push_back({{0, 2, 0}, -2.0});
  g.terms.push_back({{0, 0, 0}, 0.25});
  inst.region.push_back(g);

  std::string text = save_instance(inst);
  Instance back = load_instance(text);
  CHECK(back == inst);
  CHECK(save_instance(back) == text);
}

TEST_CASE("load reports the offending line") {
  CHECK_THROWS_WITH_AS(load_instance("bogus\n"), "line 1: header: expected 'ordmed-instance v1'",
                       ParseError);
  std::string base = "ordmed-instance v1\ndim 2\nn 1\nnorm 2\npoint 1 0 0\nomega 1 1\nlambda 1 1\n";
  CHECK_NOTHROW(load_instance(base));
  CHECK_THROWS_AS(load_instance(base + "point 2 1 1\n"), ParseError);
  CHECK_THROWS_AS(load_instance(base + "junk 1\n"), ParseError);
  CHECK_THROWS_AS(load_instance("ordmed-instance v1\ndim 2\nn 1\nnorm 2\npoint 1 0 0\nomega 1 1\n"),
                  ParseError);  // lambda missing
  CHECK_THROWS_AS(load_instance(base + "g 1 : 1*x3^2\n"), ParseError);  // var out of range
}

TEST_CASE("polynomials evaluate and report degree") {
  Polynomial g;
  g.terms.push_back({{2, 0}, 1.0});   // x1^2
  g.terms.push_back({{0, 1}, -3.0});  // -3 x2
  g.terms.push_back({{0, 0}, 0.5});
  CHECK(g.degree() == 2);
  CHECK(g.xi() == 1);
  CHECK(g.eval({2.0, 1.0}) == doctest::Approx(4.0 - 3.0 + 0.5));

  Polynomial cubic;
  cubic.terms.push_back({{1, 2}, 2.0});
  CHECK(cubic.degree() == 3);
  CHECK(cubic.xi() == 2);
}

TEST_CASE("fmt_double round-trips") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1e-17, 12345.6789, -3.333333333333333}) {
    const std::string s = fmt_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(fmt_double(1.0) == "1");
  CHECK(fmt_double(0.5) == "0.5");
}
