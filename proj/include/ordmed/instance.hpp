#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ordmed/rational.hpp"

namespace ordmed {

// Sparse polynomial over x_1..x_d, used for feasible-region constraints g(x) >= 0.
struct Polynomial {
  struct Term {
    std::vector<int> exp;  // length d
    double coef = 0.0;
    bool operator==(const Term&) const = default;
  };
  std::vector<Term> terms;

  int degree() const;
  int xi() const { return (degree() + 1) / 2; }  // ceil(deg/2)
  double eval(const std::vector<double>& x) const;
  bool operator==(const Polynomial&) const = default;
};

struct LambdaPreset {
  enum class Kind { weber, center, kcentrum, range, random_monotone };
  Kind kind = Kind::weber;
  int k = 0;               // kcentrum only
  std::uint64_t seed = 0;  // random_monotone only

  // Materializes the weight vector at length n. kcentrum with k > n errors.
  std::vector<double> make(int n) const;
  std::string str() const;
};

LambdaPreset parse_preset(const std::string& text);  // "weber", "kcentrum:5", ...

struct Instance {
  int d = 0;
  std::vector<std::vector<double>> points;  // n x d
  std::vector<double> omega;
  std::vector<double> lambda;
  RationalNorm norm;
  std::vector<Polynomial> region;

  int n() const { return static_cast<int>(points.size()); }
  // Largest |coordinate|; the demand box scale used by oracles and the
  // hierarchy's Archimedean bound.
  double box_hi() const;
  bool operator==(const Instance&) const = default;
};

struct ValidationReport {
  bool lambda_monotone = false;
  bool lambda_nonneg = false;
  bool norm_power_ok = false;  // r > s, or an l1/l2 marker
  bool omega_ok = false;
  bool dims_ok = false;
  std::vector<std::string> notes;

  bool convex_pipeline() const { return lambda_monotone && lambda_nonneg && dims_ok && omega_ok; }
  bool hierarchy_only() const { return dims_ok && omega_ok && !convex_pipeline(); }
};

// Structural defects (empty instance, length mismatches) throw; sign and
// monotonicity of lambda/omega come back as soft flags restricting which
// pipeline may run.
ValidationReport validate(const Instance& inst);

Instance generate(int n, int d, std::uint64_t seed, double box_hi, const LambdaPreset& preset,
                  RationalNorm norm, bool random_omega = false);

std::string save_instance(const Instance& inst);
Instance load_instance(const std::string& bytes);

// Shortest round-trip decimal formatting used by every writer in the project.
std::string fmt_double(double v);

}  // namespace ordmed
