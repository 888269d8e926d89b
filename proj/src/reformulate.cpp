#include "ordmed/reformulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "ordmed/errors.hpp"
#include "ordmed/powercone.hpp"

namespace ordmed::rf {
namespace {

using co::ConeKind;
using co::ConicProgram;

void check_instance(const Instance& inst, bool need_convex_lambda) {
  const ValidationReport rep = validate(inst);
  if (!rep.dims_ok || !rep.omega_ok) {
    std::string msg = "instance rejected:";
    for (const std::string& note : rep.notes) msg += " " + note + ";";
    throw ValidationError(msg);
  }
  if (need_convex_lambda) {
    if (!rep.lambda_monotone)
      throw ValidationError("ordered weights must be nonincreasing for the convex model");
    if (!rep.lambda_nonneg)
      throw ValidationError("ordered weights must be nonnegative for the convex model");
  }
}

void require_power_norm(const Instance& inst) {
  if (inst.norm.is_l1())
    throw ValidationError("norm exponent 1 gives a linear model; use build_l1");
  if (inst.norm.r <= inst.norm.s)
    throw ValidationError("norm exponent must exceed 1 for the power-cone model");
}

// Shared square-inequality chain for y^r <= u^s z^{r-s}; the structure depends
// only on the exponent, instantiation is per (point, coordinate).
struct ChainPlan {
  pc::PowerChain chain;
  std::vector<int> wids;  // distinct auxiliary indices, ascending

  int nw() const { return static_cast<int>(wids.size()); }
  int slot(int windex) const {
    return static_cast<int>(std::lower_bound(wids.begin(), wids.end(), windex) - wids.begin());
  }
};

ChainPlan plan_chain(const RationalNorm& norm) {
  ChainPlan p;
  p.chain = pc::decompose(norm.r, norm.s);
  for (const pc::ChainInequality& q : p.chain.chain)
    if (q.lhs.tag == pc::Symbol::Tag::W) p.wids.push_back(q.lhs.windex);
  std::sort(p.wids.begin(), p.wids.end());
  return p;
}

// v_i + w_k >= lambda_k z_i for every pair, n^2 rows.
void emit_vw_rows(ConicProgram& prog, const Instance& inst, const VariableMap& m,
                  BuildReport& rep) {
  const int n = m.n;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const int sl = prog.add_cols(ConeKind::nonneg, 1);
      const int row = prog.add_row(0.0);
      prog.entry(row, m.v0 + i, 1.0);
      prog.entry(row, m.w0 + k, 1.0);
      if (inst.lambda[k] != 0.0) prog.entry(row, m.z0 + i, -inst.lambda[k]);
      prog.entry(row, sl, -1.0);
      ++rep.linear_constraints;
    }
}

// y_ij >= +-(x_j - a_ij), 2 dim rows for one point.
void emit_abs_rows_for(ConicProgram& prog, const Instance& inst, const VariableMap& m, int i,
                       BuildReport& rep) {
  for (int j = 0; j < m.dim; ++j) {
    const int ycol = m.y0 + i * m.dim + j;
    const double a = inst.points[i][j];
    int sl = prog.add_cols(ConeKind::nonneg, 1);
    int row = prog.add_row(-a);
    prog.entry(row, ycol, 1.0);
    prog.entry(row, m.x0 + j, -1.0);
    prog.entry(row, sl, -1.0);
    sl = prog.add_cols(ConeKind::nonneg, 1);
    row = prog.add_row(a);
    prog.entry(row, ycol, 1.0);
    prog.entry(row, m.x0 + j, 1.0);
    prog.entry(row, sl, -1.0);
    rep.linear_constraints += 2;
  }
}

void emit_abs_rows(ConicProgram& prog, const Instance& inst, const VariableMap& m,
                   BuildReport& rep) {
  for (int i = 0; i < m.n; ++i) emit_abs_rows_for(prog, inst, m, i, rep);
}

void pin_to_zero(ConicProgram& prog, int col) {
  const int row = prog.add_row(0.0);
  prog.entry(row, col, 1.0);
}

// z_i >= coef_i * sum_j block[i*dim + j], n rows.
template <class CoefFn>
void emit_sum_rows(ConicProgram& prog, const VariableMap& m, int block0, CoefFn coef,
                   BuildReport& rep) {
  for (int i = 0; i < m.n; ++i) {
    const double ci = coef(i);
    const int sl = prog.add_cols(ConeKind::nonneg, 1);
    const int row = prog.add_row(0.0);
    prog.entry(row, m.z0 + i, 1.0);
    if (ci != 0.0)
      for (int j = 0; j < m.dim; ++j) prog.entry(row, block0 + i * m.dim + j, -ci);
    prog.entry(row, sl, -1.0);
    ++rep.linear_constraints;
  }
}

// The per-point distance machinery for tau = r/s: absolute-value rows for y,
// one rotated cone (b, c, sqrt(2) a) per chain inequality a^2 <= b c with
// three tying rows each, and the u-sum row. A zero-weight point contributes
// nothing regardless of the location, so its tower would chase an unattained
// infimum (u grows without bound as z drops to zero); instead its y, u, and
// auxiliary columns are pinned to zero and only z_i >= 0 survives. The pin
// rows keep the linear row count of the full encoding.
void emit_distance_machinery(ConicProgram& prog, const Instance& inst, const ChainPlan& plan,
                             const VariableMap& m, int wbase, BuildReport& rep) {
  const double rt2 = std::sqrt(2.0);
  const double tau = inst.norm.tau();
  const int nw = plan.nw();

  for (int i = 0; i < m.n; ++i) {
    if (inst.omega[i] == 0.0) {
      for (int j = 0; j < m.dim; ++j) {
        pin_to_zero(prog, m.y0 + i * m.dim + j);
        pin_to_zero(prog, m.u0 + i * m.dim + j);
        rep.linear_constraints += 2;
      }
      for (int j = 0; j < m.dim * nw; ++j) {
        pin_to_zero(prog, wbase + i * m.dim * nw + j);
        ++rep.tie_rows;
      }
      continue;
    }
    emit_abs_rows_for(prog, inst, m, i, rep);
  }

  emit_sum_rows(prog, m, m.u0, [&](int i) { return std::pow(inst.omega[i], tau); }, rep);

  for (int i = 0; i < m.n; ++i) {
    if (inst.omega[i] == 0.0) continue;
    for (int j = 0; j < m.dim; ++j) {
      const int wb = wbase + (i * m.dim + j) * nw;
      auto col_of = [&](const pc::Symbol& s) -> int {
        switch (s.tag) {
          case pc::Symbol::Tag::X: return m.y0 + i * m.dim + j;
          case pc::Symbol::Tag::T: return m.z0 + i;
          case pc::Symbol::Tag::U: return m.u0 + i * m.dim + j;
          case pc::Symbol::Tag::W: return wb + plan.slot(s.windex);
          default: return -1;  // the constant one
        }
      };
      for (const pc::ChainInequality& q : plan.chain.chain) {
        const int cc = prog.add_cols(ConeKind::rsoc, 3);
        const pc::Symbol rhs[2] = {q.rhs1, q.rhs2};
        for (int t = 0; t < 2; ++t) {
          const int col = col_of(rhs[t]);
          const int row = prog.add_row(col < 0 ? 1.0 : 0.0);
          prog.entry(row, cc + t, 1.0);
          if (col >= 0) prog.entry(row, col, -1.0);
          ++rep.tie_rows;
        }
        const int row = prog.add_row(0.0);
        prog.entry(row, cc + 2, 1.0);
        prog.entry(row, col_of(q.lhs), -rt2);
        ++rep.tie_rows;
      }
    }
  }
}

void finalize(BuiltProgram& out) {
  co::canonicalize(out.prog);
  co::validate_program(out.prog);
  BuildReport& rep = out.report;
  rep.columns = out.prog.ncols;
  rep.nonneg_cones = rep.soc_cones = rep.rsoc_cones = 0;
  for (const co::Cone& c : out.prog.cones) {
    if (c.kind == ConeKind::nonneg) ++rep.nonneg_cones;
    if (c.kind == ConeKind::soc) ++rep.soc_cones;
    if (c.kind == ConeKind::rsoc) ++rep.rsoc_cones;
  }
}

}  // namespace

BuiltProgram build_ordered(const Instance& inst) {
  check_instance(inst, /*need_convex_lambda=*/true);
  require_power_norm(inst);

  const int n = inst.n(), d = inst.d;
  const ChainPlan plan = plan_chain(inst.norm);
  const int nw = plan.nw();

  BuiltProgram out;
  ConicProgram& prog = out.prog;
  VariableMap& m = out.vars;
  m.dim = d;
  m.n = n;
  m.x0 = prog.add_cols(ConeKind::free_, d + 3 * n + (2 + nw) * n * d);
  m.z0 = m.x0 + d;
  m.v0 = m.z0 + n;
  m.w0 = m.v0 + n;
  m.y0 = m.w0 + n;
  m.u0 = m.y0 + n * d;
  const int wbase = m.u0 + n * d;

  for (int i = 0; i < n; ++i) prog.obj(m.v0 + i, 1.0);
  for (int k = 0; k < n; ++k) prog.obj(m.w0 + k, 1.0);

  emit_vw_rows(prog, inst, m, out.report);
  emit_distance_machinery(prog, inst, plan, m, wbase, out.report);

  finalize(out);
  return out;
}

BuiltProgram build_l1(const Instance& inst) {
  check_instance(inst, /*need_convex_lambda=*/true);
  if (!inst.norm.is_l1())
    throw ValidationError("build_l1 requires norm exponent 1");

  const int n = inst.n(), d = inst.d;
  BuiltProgram out;
  ConicProgram& prog = out.prog;
  VariableMap& m = out.vars;
  m.dim = d;
  m.n = n;
  m.x0 = prog.add_cols(ConeKind::free_, d + 3 * n + n * d);
  m.z0 = m.x0 + d;
  m.v0 = m.z0 + n;
  m.w0 = m.v0 + n;
  m.y0 = m.w0 + n;

  for (int i = 0; i < n; ++i) prog.obj(m.v0 + i, 1.0);
  for (int k = 0; k < n; ++k) prog.obj(m.w0 + k, 1.0);

  emit_vw_rows(prog, inst, m, out.report);
  emit_abs_rows(prog, inst, m, out.report);
  emit_sum_rows(prog, m, m.y0, [&](int i) { return inst.omega[i]; }, out.report);

  finalize(out);
  return out;
}

BuiltProgram build_l2(const Instance& inst) {
  check_instance(inst, /*need_convex_lambda=*/true);
  if (!inst.norm.is_l2())
    throw ValidationError("build_l2 requires norm exponent 2");

  const int n = inst.n(), d = inst.d;
  BuiltProgram out;
  ConicProgram& prog = out.prog;
  VariableMap& m = out.vars;
  m.dim = d;
  m.n = n;
  m.x0 = prog.add_cols(ConeKind::free_, d + 3 * n);
  m.z0 = m.x0 + d;
  m.v0 = m.z0 + n;
  m.w0 = m.v0 + n;

  for (int i = 0; i < n; ++i) prog.obj(m.v0 + i, 1.0);
  for (int k = 0; k < n; ++k) prog.obj(m.w0 + k, 1.0);

  emit_vw_rows(prog, inst, m, out.report);

  // (z_i, omega_i (x - a_i)) in a second-order cone per point.
  for (int i = 0; i < n; ++i) {
    const double wi = inst.omega[i];
    const int sc0 = prog.add_cols(ConeKind::soc, d + 1);
    int row = prog.add_row(0.0);
    prog.entry(row, sc0, 1.0);
    prog.entry(row, m.z0 + i, -1.0);
    ++out.report.tie_rows;
    for (int j = 0; j < d; ++j) {
      row = prog.add_row(-wi * inst.points[i][j]);
      prog.entry(row, sc0 + 1 + j, 1.0);
      if (wi != 0.0) prog.entry(row, m.x0 + j, -wi);
      ++out.report.tie_rows;
    }
  }

  finalize(out);
  return out;
}

BuiltProgram build_ksum(const Instance& inst) {
  check_instance(inst, /*need_convex_lambda=*/true);
  require_power_norm(inst);

  const int n = inst.n(), d = inst.d;
  const ChainPlan plan = plan_chain(inst.norm);
  const int nw = plan.nw();

  // Active levels carry a positive gap lambda_k - lambda_{k+1} (lambda_{n+1}
  // reads as zero); the rest contribute nothing to the objective.
  std::vector<int> levels;
  std::vector<double> gaps;
  for (int k = 0; k < n; ++k) {
    const double gap = inst.lambda[k] - (k + 1 < n ? inst.lambda[k + 1] : 0.0);
    if (gap > 0.0) {
      levels.push_back(k + 1);
      gaps.push_back(gap);
    }
  }
  const int na = static_cast<int>(levels.size());

  BuiltProgram out;
  ConicProgram& prog = out.prog;
  VariableMap& m = out.vars;
  m.dim = d;
  m.n = n;
  m.x0 = prog.add_cols(ConeKind::free_, d + n + (2 + nw) * n * d + na * n);
  m.z0 = m.x0 + d;
  m.y0 = m.z0 + n;
  m.u0 = m.y0 + n * d;
  const int wbase = m.u0 + n * d;
  const int rbase = wbase + n * d * nw;
  // Level thresholds are sign-constrained: distances are nonnegative, so
  // restricting the threshold keeps the k-largest sum exact while removing
  // the flat recession ray of the full-sum level.
  m.s0 = (na > 0) ? prog.add_cols(ConeKind::nonneg, na) : -1;

  for (int a = 0; a < na; ++a) {
    prog.obj(m.s0 + a, gaps[a] * levels[a]);
    for (int j = 0; j < n; ++j) prog.obj(rbase + a * n + j, gaps[a]);
  }

  // r_aj >= z_j - t_a and r_aj >= 0 per active level.
  for (int a = 0; a < na; ++a)
    for (int j = 0; j < n; ++j) {
      const int rcol = rbase + a * n + j;
      int sl = prog.add_cols(ConeKind::nonneg, 1);
      int row = prog.add_row(0.0);
      prog.entry(row, rcol, 1.0);
      prog.entry(row, m.z0 + j, -1.0);
      prog.entry(row, m.s0 + a, 1.0);
      prog.entry(row, sl, -1.0);
      sl = prog.add_cols(ConeKind::nonneg, 1);
      row = prog.add_row(0.0);
      prog.entry(row, rcol, 1.0);
      prog.entry(row, sl, -1.0);
      out.report.linear_constraints += 2;
    }

  emit_distance_machinery(prog, inst, plan, m, wbase, out.report);

  finalize(out);
  return out;
}

double ordered_value(const Instance& inst, const std::vector<double>& x) {
  const int n = inst.n(), d = inst.d;
  if (static_cast<int>(x.size()) != d)
    throw ValidationError("ordered_value: location has the wrong dimension");
  const double tau = inst.norm.tau();
  std::vector<double> dist(n);
  for (int i = 0; i < n; ++i) {
    double nrm = 0.0;
    if (inst.norm.is_l1()) {
      for (int j = 0; j < d; ++j) nrm += std::abs(x[j] - inst.points[i][j]);
    } else if (inst.norm.is_l2()) {
      for (int j = 0; j < d; ++j) {
        const double t = x[j] - inst.points[i][j];
        nrm += t * t;
      }
      nrm = std::sqrt(nrm);
    } else {
      for (int j = 0; j < d; ++j) nrm += std::pow(std::abs(x[j] - inst.points[i][j]), tau);
      nrm = std::pow(nrm, 1.0 / tau);
    }
    dist[i] = inst.omega[i] * nrm;
  }
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return dist[a] > dist[b]; });
  double val = 0.0;
  for (int k = 0; k < n; ++k) val += inst.lambda[k] * dist[idx[k]];
  return val;
}

}  // namespace ordmed::rf
