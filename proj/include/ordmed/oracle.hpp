#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ordmed/instance.hpp"
#include "ordmed/solver.hpp"

namespace ordmed::orc {

// One oracle run.  value is always objective(inst, point) recomputed at the
// returned point, never an internally tracked running figure.
struct OracleReport {
  std::string method;         // "weiszfeld" | "subgradient" | "grid"
  std::vector<double> point;  // reference location
  double value = 0.0;
  long long evaluations = 0;  // objective evaluations (grid, subgradient) or iterations (weiszfeld)
  double gap = 0.0;           // cross_check: |candidate - value| / max(1, |value|)
  bool pass = true;           // cross_check verdict
};

// Ordered median value at x: weighted l_tau distances sorted nonincreasingly
// (ties by point index) and dotted with lambda.  Evaluation-side twin of the
// model builders' recompute; shares no code with them.
double objective(const Instance& inst, const std::vector<double>& x);

// Classical fixed-point iteration for the l2 Weber point.  Requires tau == 2
// and lambda identically one; omega weights are free.  Starts from the
// weighted centroid; an iterate landing within 1e-12 of a demand point gets
// the vertex optimality test (stay if optimal, else a guarded step along the
// negative subgradient).  Stops when the step drops below tol.
OracleReport weiszfeld(const Instance& inst, int max_iter = 10000, double tol = 1e-12);

// Multi-start projected subgradient descent over the demand box, 8 starts
// (weighted centroid plus 7 seeded uniform draws), steps diag/sqrt(t).
// Requires lambda nonincreasing and nonnegative.  Upper-bound oracle: returns
// the best point seen, never claimed optimal.
OracleReport subgradient_solve(const Instance& inst, int iters = 20000, std::uint64_t seed = 1);

// Coarse-to-fine grid search over [lo, hi], d <= 3 only: 21 nodes per axis,
// recenter on the incumbent, shrink the box tenfold, `levels` times.  Boxes
// stay clamped inside [lo, hi].  Points violating a region polynomial are
// skipped, so on constrained instances the result is a feasible upper bound.
OracleReport grid_refine(const Instance& inst, const std::vector<double>& lo,
                         const std::vector<double>& hi, int levels = 7);

// Convenience box: the demand hull.  For nonincreasing nonnegative lambda the
// hull contains an optimum (coordinate-wise projection onto it shrinks every
// distance), so the default box loses nothing on the convex pipeline.
OracleReport grid_refine(const Instance& inst, int levels = 7);

// Verifies a recovered solution against the strongest applicable oracle:
// weiszfeld when legal, else the grid in d <= 3, else subgradient descent.
// The candidate objective is recomputed at candidate.x before comparing.
// Constrained instances need an explicit box; use grid_refine directly.
OracleReport cross_check(const Instance& inst, const so::LocationSolution& candidate, double tol);

}  // namespace ordmed::orc
