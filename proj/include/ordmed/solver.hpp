#pragma once

#include <vector>

#include "ordmed/conic.hpp"
#include "ordmed/instance.hpp"
#include "ordmed/reformulate.hpp"

namespace ordmed::so {

struct SolverOptions {
  double gap_tol = 1e-8;   // relative duality gap
  double feas_tol = 1e-8;  // relative primal/dual residuals
  int max_iter = 200;
  enum class Init { unit } init = Init::unit;
  bool deterministic = true;  // no wall-clock or address-dependent choices
  bool trace = false;         // one progress line per iteration on stderr

  void validate() const;  // throws co::ValidationError on nonsense
};

// Homogeneous self-dual interior-point solve.  Returns status optimal only
// when gap and both residuals meet the tolerances; infeasibility statuses
// carry the certificate in (y, s) resp. x scaled to unit objective.
co::SolveResult solve(const co::ConicProgram& prog, const SolverOptions& opts = {});

struct LocationSolution {
  std::vector<double> x;           // recovered location
  std::vector<double> z;           // per-point weighted distance variables
  double program_value = 0.0;      // objective reported by the solver
  double recomputed_value = 0.0;   // ordered objective re-evaluated at x
  double discrepancy = 0.0;        // |program - recomputed|
};

// Pulls the location out of a solve of a built program and cross-checks the
// objective by direct evaluation on the instance.
LocationSolution recover_location(const co::SolveResult& res, const rf::VariableMap& vars,
                                  const Instance& inst);

}  // namespace ordmed::so
