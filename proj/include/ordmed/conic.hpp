#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ordmed::co {

enum class ConeKind { free_, nonneg, soc, rsoc, psd };

std::string cone_name(ConeKind k);

// One cone over a contiguous column range. soc(dim) is (t, x): ||x|| <= t.
// rsoc(dim) is (p, q, r): 2pq >= ||r||^2, p, q >= 0. psd stores the lower
// triangle column-major as svec with off-diagonals scaled by sqrt(2), so the
// standard dot product of two svecs equals the matrix inner product.
struct Cone {
  ConeKind kind = ConeKind::free_;
  int offset = 0;
  int dim = 0;   // number of columns (psd: size*(size+1)/2)
  int size = 0;  // psd matrix size, 0 otherwise
  bool operator==(const Cone&) const = default;
};

struct Triplet {
  int row = 0, col = 0;
  double val = 0.0;
  bool operator==(const Triplet&) const = default;
};

// min c.u + obj_const  s.t.  A u = b,  u in K (cones partition the columns).
struct ConicProgram {
  int ncols = 0;
  int nrows = 0;
  std::vector<double> c;
  std::vector<Triplet> A;
  std::vector<double> b;
  std::vector<Cone> cones;  // ordered by offset, covers [0, ncols)
  double obj_const = 0.0;

  // Assembly helpers; cones must be added left to right.
  int add_cols(ConeKind kind, int dim_or_size = 1);  // returns first column
  int add_row(double rhs = 0.0);
  void entry(int row, int col, double val) { A.push_back({row, col, val}); }
  void obj(int col, double val) { c[col] = val; }

  bool operator==(const ConicProgram&) const = default;
};

// Sorts triplets by (row, col), merges duplicates, drops exact zeros.
void canonicalize(ConicProgram& prog);

// Throws ValidationError on malformed programs (cone coverage, index ranges,
// dimension mismatches).
void validate_program(const ConicProgram& prog);

enum class SolveStatus { optimal, primal_infeasible, dual_infeasible, max_iter, numerical };

std::string status_name(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::numerical;
  std::vector<double> x;  // primal, per program column
  std::vector<double> y;  // equality duals, per program row
  std::vector<double> s;  // dual slacks, per program column
  double pobj = 0.0, dobj = 0.0;
  double gap = 0.0;        // |pobj - dobj| / max(1, |pobj|)
  double pres = 0.0, dres = 0.0;
  int iters = 0;
  std::string note;  // diagnostics for max_iter / numerical / infeasible
};

// svec layout helpers for psd cones.
int svec_dim(int size);
int svec_index(int size, int i, int j);  // i >= j, lower triangle col-major
// Dense symmetric matrix (row-major, size*size) from svec and back.
void svec_to_mat(const double* v, double* m, int size);
void mat_to_svec(const double* m, double* v, int size);

// Replaces every soc/rsoc cone by a PSD block plus tying equality rows:
// rsoc(3)(p,q,r) through [[p+q, 0, sqrt(2) r], [0, p+q, p-q],
// [sqrt(2) r, p-q, p+q]] >= 0 with an explicit p+q >= 0 slack row; larger
// cones through the arrow-matrix embedding. Optimal value is preserved.
ConicProgram rsoc_to_psd(const ConicProgram& prog);

// SDPA sparse (.dat-s). The writer presolves into the SDPA variable form
// (comment header documents the sign conventions); requires a program free of
// soc/rsoc cones (run rsoc_to_psd first). The reader reconstructs a program
// whose re-export is byte-identical for diagonal data and equal to the last
// ulp for psd off-diagonals (svec scaling is irrational).
std::string export_sdpa(const ConicProgram& prog);
ConicProgram import_sdpa(const std::string& text);

// CBF v3. All cones supported; psd cones must occupy the trailing columns
// (they travel as PSDVAR entries). reader(writer(P)) == P exactly for
// programs without psd cones.
std::string export_cbf(const ConicProgram& prog);
ConicProgram import_cbf(const std::string& text);

}  // namespace ordmed::co
