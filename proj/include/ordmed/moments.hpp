#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ordmed/conic.hpp"
#include "ordmed/instance.hpp"
#include "ordmed/reformulate.hpp"

namespace ordmed::mo {

// Lifting scope.  x_only lifts just the location variables and leaves the
// cone machinery to couple everything else; full lifts the whole variable
// vector (x, z, v, w, u, y), dimension 3n + (2n+1)d, and is usually
// export-only at desk scale.
enum class Scope { x_only, full };

// Exponent multi-index over the lifted variables.  Canonical enumeration is
// graded: lower total degree first, ties by descending exponent vector, which
// reproduces the listing 1, x_1, ..., x_D, x_1^2, x_1 x_2, ...
struct MonomialIndex {
  std::vector<int> exp;
  int degree() const;
  bool operator==(const MonomialIndex&) const = default;
};

bool graded_less(const MonomialIndex& a, const MonomialIndex& b);

// All monomials over nvars variables with total degree <= max_degree, in
// canonical order.
std::vector<MonomialIndex> enumerate_monomials(int nvars, int max_degree);

// Moment-side description of a built relaxation.  kappa[i] lives in program
// column kcol0 + i; basis indexes the moment matrix used for flatness checks
// (the x-marginal matrix on the range path, the full lifted matrix
// otherwise); mom_entry maps its lower-triangle svec slots to kappa indices.
struct MomentProblem {
  Scope scope = Scope::x_only;
  int lift_dim = 0;
  int order = 0;  // N
  int n0 = 1;     // max(max_k ceil(deg g_k / 2), 1)
  int kcol0 = -1;
  std::vector<MonomialIndex> kappa;
  std::vector<MonomialIndex> basis;
  std::vector<int> mom_entry;
  std::vector<std::pair<int, int>> links;  // (structural column, kappa index)
};

// Block sizes the build would create, computed without assembling anything,
// so callers can refuse oversized programs up front.
struct HierarchySizes {
  int lift_dim = 0;
  int moment_dim = 0;          // largest moment-matrix block
  std::vector<int> psd_dims;   // every psd block in build order
  long long kappa_count = 0;
};

HierarchySizes hierarchy_sizes(const Instance& inst, int order, Scope scope = Scope::x_only);

struct BuiltHierarchy {
  co::ConicProgram prog;
  MomentProblem mp;
  rf::VariableMap vars;
};

// Order-N relaxation of a constrained instance.  Nonincreasing nonnegative
// lambda keeps the convex model rows and adds the moment matrix, one
// localizing block per region polynomial, first-order linking rows, and
// kappa_0 = 1.  The range pattern (1, 0, ..., 0, -1) with tau = 2 switches to
// the distance-variable wrap from range_objective_wrap, lifting (x, z) with
// one moment block per demand point.  An instance without region polynomials
// gets the quadratic ball d * box_hi^2 - sum x_j^2 appended, so compactness
// (and with it convergence of the bound sequence) always holds.  Builds whose
// largest moment block would exceed psd_cap throw instead of assembling;
// such programs are export material, not desk solves.
BuiltHierarchy build_hierarchy(const Instance& inst, int order, Scope scope = Scope::x_only,
                               int psd_cap = 2000);

// Polynomial rewrite backing the range path: minimize t_max - t_min over
// t_min <= z_i <= t_max with z_i >= 0 pinned to the squared distance by the
// degree-2 equalities z_i^2 = omega_i^2 ||x - a_i||_2^2.  Only tau = 2 keeps
// the tie at degree 2, so anything else is rejected.
struct RangeWrap {
  int lift_dim = 0;                // d + n, x first then z
  std::vector<Polynomial> ties;    // q_i(x, z) = 0, one per demand point
  std::vector<Polynomial> region;  // g_k lifted to (x, z), ball appended when absent
};

RangeWrap range_objective_wrap(const Instance& inst);

// kappa block of a solve, aligned with mp.kappa.
std::vector<double> kappa_values(const co::SolveResult& res, const MomentProblem& mp);

struct FlatnessReport {
  bool flat = false;
  int theta = 0;  // common rank when flat
  int rank_full = 0;
  int rank_sub = 0;
};

// Numerical ranks of M_N and M_{N-n0} from the moment vector; rank counts
// eigenvalues above rel_threshold times the largest in magnitude.
FlatnessReport flatness_check(const std::vector<double>& moments, const MomentProblem& mp,
                              int n0, double rel_threshold = 1e-6);

struct CandidateReport {
  std::vector<double> x;         // first-order moments of the location block
  std::vector<double> margins;   // g_k(x) per region polynomial, sign preserved
  bool feasible = true;          // margins nonnegative up to solver roundoff
  double objective = 0.0;        // instance objective recomputed at x
  double bound = 0.0;            // relaxation value supplied by the caller
  double eps = 0.0;              // epsilon_obj(bound, objective)
};

// First-order-moment candidate with feasibility and objective certification.
// Infeasibility shows up as negative margins, never as an exception.
CandidateReport extract_candidate(const std::vector<double>& moments, const MomentProblem& mp,
                                  const Instance& inst, double bound);

// |relaxation_value - fopt| / max(1, fopt)
double epsilon_obj(double relaxation_value, double fopt);

}  // namespace ordmed::mo
