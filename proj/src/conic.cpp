#include "ordmed/conic.hpp"

#include <algorithm>
#include <cmath>

#include "ordmed/errors.hpp"

namespace ordmed::co {

std::string cone_name(ConeKind k) {
  switch (k) {
    case ConeKind::free_: return "free";
    case ConeKind::nonneg: return "nonneg";
    case ConeKind::soc: return "soc";
    case ConeKind::rsoc: return "rsoc";
    case ConeKind::psd: return "psd";
  }
  return "?";
}

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::primal_infeasible: return "primal_infeasible";
    case SolveStatus::dual_infeasible: return "dual_infeasible";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::numerical: return "numerical";
  }
  return "?";
}

int ConicProgram::add_cols(ConeKind kind, int dim_or_size) {
  Cone cone;
  cone.kind = kind;
  cone.offset = ncols;
  if (kind == ConeKind::psd) {
    cone.size = dim_or_size;
    cone.dim = svec_dim(dim_or_size);
  } else {
    cone.dim = dim_or_size;
  }
  ncols += cone.dim;
  c.resize(ncols, 0.0);
  cones.push_back(cone);
  return cone.offset;
}

int ConicProgram::add_row(double rhs) {
  b.push_back(rhs);
  return nrows++;
}

void canonicalize(ConicProgram& prog) {
  std::sort(prog.A.begin(), prog.A.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Triplet> merged;
  merged.reserve(prog.A.size());
  for (const Triplet& t : prog.A) {
    if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col)
      merged.back().val += t.val;
    else
      merged.push_back(t);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const Triplet& t) { return t.val == 0.0; }),
               merged.end());
  prog.A = std::move(merged);
}

void validate_program(const ConicProgram& prog) {
  if (static_cast<int>(prog.c.size()) != prog.ncols)
    throw ValidationError("program: objective length != column count");
  if (static_cast<int>(prog.b.size()) != prog.nrows)
    throw ValidationError("program: rhs length != row count");
  int at = 0;
  for (const Cone& cone : prog.cones) {
    if (cone.offset != at) throw ValidationError("program: cones must tile the columns in order");
    if (cone.dim < 1) throw ValidationError("program: empty cone");
    if (cone.kind == ConeKind::psd) {
      if (cone.size < 1 || cone.dim != svec_dim(cone.size))
        throw ValidationError("program: psd cone dim != svec size");
    } else if (cone.kind == ConeKind::rsoc && cone.dim < 2) {
      throw ValidationError("program: rsoc cone needs dim >= 2");
    }
    at += cone.dim;
  }
  if (at != prog.ncols) throw ValidationError("program: cones do not cover all columns");
  for (const Triplet& t : prog.A) {
    if (t.row < 0 || t.row >= prog.nrows || t.col < 0 || t.col >= prog.ncols)
      throw ValidationError("program: matrix entry out of range");
    if (!std::isfinite(t.val)) throw ValidationError("program: non-finite matrix entry");
  }
  for (double v : prog.c)
    if (!std::isfinite(v)) throw ValidationError("program: non-finite objective entry");
  for (double v : prog.b)
    if (!std::isfinite(v)) throw ValidationError("program: non-finite rhs entry");
}

int svec_dim(int size) { return size * (size + 1) / 2; }

int svec_index(int size, int i, int j) {
  // lower triangle (i >= j), column-major
  return j * size - j * (j - 1) / 2 + (i - j);
}

void svec_to_mat(const double* v, double* m, int size) {
  const double inv_rt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < size; ++j)
    for (int i = j; i < size; ++i) {
      double val = v[svec_index(size, i, j)];
      if (i != j) val *= inv_rt2;
      m[i * size + j] = val;
      m[j * size + i] = val;
    }
}

void mat_to_svec(const double* m, double* v, int size) {
  const double rt2 = std::sqrt(2.0);
  for (int j = 0; j < size; ++j)
    for (int i = j; i < size; ++i)
      v[svec_index(size, i, j)] = i == j ? m[i * size + j] : m[i * size + j] * rt2;
}

ConicProgram rsoc_to_psd(const ConicProgram& prog) {
  validate_program(prog);
  ConicProgram out = prog;
  const double rt2 = std::sqrt(2.0);

  for (std::size_t ci = 0; ci < prog.cones.size(); ++ci) {
    const Cone cone = prog.cones[ci];
    if (cone.kind != ConeKind::soc && cone.kind != ConeKind::rsoc) continue;
    out.cones[ci].kind = ConeKind::free_;
    out.cones[ci].size = 0;

    if (cone.kind == ConeKind::rsoc && cone.dim == 3) {
      // a^2 <= bc as [[b+c, 0, 2a], [0, b+c, b-c], [2a, b-c, b+c]] >= 0 with
      // b+c >= 0; here (p, q, r) = (b, c, a*sqrt(2)), so 2a = sqrt(2) r.
      const int p = cone.offset, q = cone.offset + 1, r = cone.offset + 2;
      const int sv = out.add_cols(ConeKind::psd, 3);
      auto tie = [&](int coord, std::initializer_list<std::pair<int, double>> expr) {
        const int row = out.add_row(0.0);
        out.entry(row, sv + coord, 1.0);
        for (auto [col, val] : expr) out.entry(row, col, -val);
      };
      tie(0, {{p, 1.0}, {q, 1.0}});          // P11 = p+q
      tie(1, {});                            // P21 = 0
      tie(2, {{r, 2.0}});                    // svec P31 = sqrt(2)*sqrt(2) r = 2r
      tie(3, {{p, 1.0}, {q, 1.0}});          // P22 = p+q
      tie(4, {{p, rt2}, {q, -rt2}});         // svec P32 = sqrt(2)(p-q)
      tie(5, {{p, 1.0}, {q, 1.0}});          // P33 = p+q
      const int slack = out.add_cols(ConeKind::nonneg, 1);
      const int row = out.add_row(0.0);
      out.entry(row, p, 1.0);
      out.entry(row, q, 1.0);
      out.entry(row, slack, -1.0);
      continue;
    }

    // Arrow embedding for soc (t, x): M11 = t, M_i1 = x_{i-1}, M_ii = t.
    // rsoc rotates into soc first: t = (p+q)/sqrt(2), x_1 = (p-q)/sqrt(2).
    const int size = cone.dim;
    const int sv = out.add_cols(ConeKind::psd, size);
    const bool rot = cone.kind == ConeKind::rsoc;
    const double irt2 = 1.0 / rt2;
    auto coord_col = [&](int ell) { return cone.offset + ell; };  // ell in [0, dim)
    for (int j = 0; j < size; ++j)
      for (int i = j; i < size; ++i) {
        const int row = out.add_row(0.0);
        out.entry(row, sv + svec_index(size, i, j), 1.0);
        if (i == j) {
          // M_ii = t
          if (rot) {
            out.entry(row, coord_col(0), -irt2);
            out.entry(row, coord_col(1), -irt2);
          } else {
            out.entry(row, coord_col(0), -1.0);
          }
        } else if (j == 0) {
          // svec M_i1 = sqrt(2) x_{i-1}
          if (rot && i == 1) {
            // sqrt(2)(p-q)/sqrt(2) = p - q
            out.entry(row, coord_col(0), -1.0);
            out.entry(row, coord_col(1), 1.0);
          } else {
            out.entry(row, coord_col(i), -rt2);
          }
        }
        // other off-diagonals are zero: row reads svec coord = 0
      }
  }

  canonicalize(out);
  return out;
}

}  // namespace ordmed::co
