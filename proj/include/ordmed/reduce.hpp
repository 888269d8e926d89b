#pragma once

#include <vector>

#include "ordmed/conic.hpp"

namespace ordmed::co {

// Presolved two-block form shared by the interior-point solver and the SDPA
// writer:
//
//   min c.x + c0   s.t.   Aeq x = beq,   s = h - G x,   s in K_rows
//
// Structural columns x are the original free columns plus every cone column
// that could not be eliminated. A cone column is eliminated when it appears
// in exactly one equality row and that row hosts no other eliminated column;
// the row then turns into a cone row (solved for the column exactly, so any
// nonzero coefficient works). Cones are eliminated atomically. Cone columns
// that stay structural get appended identity rows s = u.
struct RowCone {
  ConeKind kind = ConeKind::nonneg;
  int offset = 0;  // first cone row
  int dim = 0;
  int size = 0;  // psd only
};

struct ReducedForm {
  int nx = 0;
  std::vector<int> xcols;  // structural index -> original column
  std::vector<double> c;   // length nx
  double c0 = 0.0;

  int neq = 0;
  std::vector<Triplet> Aeq;
  std::vector<double> beq;
  std::vector<int> eq_orig_row;  // equality index -> original row

  int nsrows = 0;
  std::vector<Triplet> G;
  std::vector<double> h;
  std::vector<RowCone> rows;
  std::vector<int> srow_col;       // cone row -> original column it carries
  std::vector<int> srow_orig_row;  // cone row -> original row, -1 if appended
  std::vector<double> srow_coef;   // pivot coefficient of that column, 1 if appended

  std::vector<int> col_x;     // original column -> structural index, -1 if eliminated
  std::vector<int> col_srow;  // original column -> cone row, -1 if structural
};

ReducedForm reduce(const ConicProgram& prog);

// Recovers a full-length primal vector from structural x and cone slacks s.
std::vector<double> recover_primal(const ReducedForm& rf, const std::vector<double>& x,
                                   const std::vector<double>& s);

}  // namespace ordmed::co
