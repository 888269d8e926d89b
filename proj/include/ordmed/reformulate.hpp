#pragma once

#include <vector>

#include "ordmed/conic.hpp"
#include "ordmed/instance.hpp"

namespace ordmed::rf {

// Column layout of a built program.  Offsets are -1 when the block is absent.
// x spans dim columns, z/v/w span n columns each, y/u span n*dim columns
// (point-major: column i*dim+j holds point i, coordinate j).
struct VariableMap {
  int dim = 0;
  int n = 0;
  int x0 = -1;
  int z0 = -1;
  int v0 = -1;
  int w0 = -1;
  int y0 = -1;
  int u0 = -1;
  int s0 = -1;  // per-active-level threshold columns (k-sum builder)
};

// Model-level statistics.  linear_constraints counts the formulation's linear
// (in)equalities; rows that merely tie cone coordinates to existing columns
// are part of the conic encoding and reported separately via tie_rows.
struct BuildReport {
  int linear_constraints = 0;
  int tie_rows = 0;
  int nonneg_cones = 0;
  int soc_cones = 0;
  int rsoc_cones = 0;
  int columns = 0;
};

struct BuiltProgram {
  co::ConicProgram prog;
  VariableMap vars;
  BuildReport report;
};

// Epigraph-of-ordered-objective reformulation for rational tau = r/s > 1.
// Requires lambda nonincreasing and nonnegative; tau == 1 is rejected with a
// pointer to build_l1.  Linear constraint count is n^2 + n(2 dim + 1).
BuiltProgram build_ordered(const Instance& inst);

// Pure LP for tau == 1 (distances are weighted l1 norms).
BuiltProgram build_l1(const Instance& inst);

// Second-order-cone model for tau == 2; skips the power-cone towers.
BuiltProgram build_l2(const Instance& inst);

// Level-sum model: objective sum_k (lambda_k - lambda_{k+1}) S_k where S_k
// bounds the sum of the k largest weighted distances.  Levels with zero gap
// emit no rows.  Distances use the same cone machinery as build_ordered.
BuiltProgram build_ksum(const Instance& inst);

// Objective value at a candidate location: weighted distances are sorted
// nonincreasingly (ties broken by point index) and paired with lambda.
double ordered_value(const Instance& inst, const std::vector<double>& x);

}  // namespace ordmed::rf
