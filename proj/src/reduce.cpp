#include "ordmed/reduce.hpp"

#include <algorithm>
#include <cmath>

#include "ordmed/errors.hpp"

namespace ordmed::co {

ReducedForm reduce(const ConicProgram& prog_in) {
  ConicProgram prog = prog_in;
  canonicalize(prog);
  validate_program(prog);

  // Per-column entry lists.
  std::vector<std::vector<std::pair<int, double>>> col_entries(prog.ncols);
  for (const Triplet& t : prog.A) col_entries[t.col].push_back({t.row, t.val});

  ReducedForm rf;
  rf.c0 = prog.obj_const;
  rf.col_x.assign(prog.ncols, -1);
  rf.col_srow.assign(prog.ncols, -1);

  // Pick eliminations: a cone goes if every column sits in exactly one row,
  // rows are distinct, unclaimed, and the pivot is not vanishingly small.
  std::vector<int> row_claim(prog.nrows, -1);  // row -> eliminated column
  std::vector<char> cone_elim(prog.cones.size(), 0);
  for (std::size_t ci = 0; ci < prog.cones.size(); ++ci) {
    const Cone& cone = prog.cones[ci];
    if (cone.kind == ConeKind::free_) continue;
    bool ok = true;
    std::vector<int> rows(cone.dim, -1);
    for (int ell = 0; ell < cone.dim && ok; ++ell) {
      const auto& ents = col_entries[cone.offset + ell];
      if (ents.size() != 1 || std::abs(ents[0].second) < 1e-12) {
        ok = false;
        break;
      }
      const int row = ents[0].first;
      if (row_claim[row] != -1) ok = false;
      for (int prev = 0; prev < ell && ok; ++prev)
        if (rows[prev] == row) ok = false;
      rows[ell] = row;
    }
    if (!ok) continue;
    cone_elim[ci] = 1;
    for (int ell = 0; ell < cone.dim; ++ell) row_claim[rows[ell]] = cone.offset + ell;
  }

  // Structural columns in original order.
  for (std::size_t ci = 0; ci < prog.cones.size(); ++ci) {
    if (cone_elim[ci]) continue;
    const Cone& cone = prog.cones[ci];
    for (int ell = 0; ell < cone.dim; ++ell) {
      rf.col_x[cone.offset + ell] = rf.nx++;
      rf.xcols.push_back(cone.offset + ell);
    }
  }
  rf.c.assign(rf.nx, 0.0);
  for (int j = 0; j < prog.ncols; ++j)
    if (rf.col_x[j] >= 0) rf.c[rf.col_x[j]] = prog.c[j];

  // Row entry lists for building cone rows and equalities.
  std::vector<std::vector<std::pair<int, double>>> row_entries(prog.nrows);
  for (const Triplet& t : prog.A) row_entries[t.row].push_back({t.col, t.val});

  // Cone rows, one block per eliminated cone, then identity blocks for the
  // structural cones, in cone order.
  for (std::size_t ci = 0; ci < prog.cones.size(); ++ci) {
    const Cone& cone = prog.cones[ci];
    if (cone.kind == ConeKind::free_) continue;
    RowCone rc{cone.kind, rf.nsrows, cone.dim, cone.size};
    if (cone_elim[ci]) {
      for (int ell = 0; ell < cone.dim; ++ell) {
        const int col = cone.offset + ell;
        const int row = col_entries[col][0].first;
        const double g = col_entries[col][0].second;
        const int crow = rf.nsrows++;
        rf.h.push_back(prog.b[row] / g);
        for (const auto& [other, val] : row_entries[row])
          if (other != col) rf.G.push_back({crow, rf.col_x[other], val / g});
        rf.srow_col.push_back(col);
        rf.srow_orig_row.push_back(row);
        rf.srow_coef.push_back(g);
        rf.col_srow[col] = crow;
      }
    } else {
      for (int ell = 0; ell < cone.dim; ++ell) {
        const int col = cone.offset + ell;
        const int crow = rf.nsrows++;
        rf.h.push_back(0.0);
        rf.G.push_back({crow, rf.col_x[col], -1.0});
        rf.srow_col.push_back(col);
        rf.srow_orig_row.push_back(-1);
        rf.srow_coef.push_back(1.0);
      }
    }
    rf.rows.push_back(rc);
  }

  // Unclaimed rows stay equalities (they touch only structural columns).
  for (int row = 0; row < prog.nrows; ++row) {
    if (row_claim[row] != -1) continue;
    const int eq = rf.neq++;
    rf.beq.push_back(prog.b[row]);
    rf.eq_orig_row.push_back(row);
    for (const auto& [col, val] : row_entries[row]) rf.Aeq.push_back({eq, rf.col_x[col], val});
  }

  // Fold eliminated columns' objective coefficients: c_j u_j with
  // u_j = h_crow - G_crow.x.
  std::vector<std::vector<std::pair<int, double>>> g_rows(rf.nsrows);
  for (const Triplet& t : rf.G) g_rows[t.row].push_back({t.col, t.val});
  for (int j = 0; j < prog.ncols; ++j) {
    if (rf.col_srow[j] < 0 || prog.c[j] == 0.0) continue;
    const int crow = rf.col_srow[j];
    rf.c0 += prog.c[j] * rf.h[crow];
    for (const auto& [col, val] : g_rows[crow]) rf.c[col] -= prog.c[j] * val;
  }

  return rf;
}

std::vector<double> recover_primal(const ReducedForm& rf, const std::vector<double>& x,
                                   const std::vector<double>& s) {
  std::vector<double> out(rf.col_x.size(), 0.0);
  for (std::size_t j = 0; j < rf.col_x.size(); ++j) {
    if (rf.col_x[j] >= 0)
      out[j] = x[rf.col_x[j]];
    else
      out[j] = s[rf.col_srow[j]];
  }
  return out;
}

}  // namespace ordmed::co
