#include "ordmed/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "ordmed/errors.hpp"
#include "ordmed/linalg.hpp"

namespace ordmed::mo {

namespace {

constexpr double kRt2 = 1.4142135623730951;

long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (int t = 1; t <= k; ++t) {
    r = r * (n - k + t) / t;
    if (r > (1LL << 50)) return 1LL << 50;  // saturate, only magnitude matters
  }
  return r;
}

void enumerate_exact(std::vector<int>& exp, int pos, int remaining,
                     std::vector<MonomialIndex>& out) {
  if (pos + 1 == static_cast<int>(exp.size())) {
    exp[pos] = remaining;
    out.push_back({exp});
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    exp[pos] = e;
    enumerate_exact(exp, pos + 1, remaining - e, out);
  }
  exp[pos] = 0;
}

std::vector<int> exp_sum(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> r(a.size());
  for (std::size_t t = 0; t < a.size(); ++t) r[t] = a[t] + b[t];
  return r;
}

std::vector<int> pad_exp(const std::vector<int>& exp, int lift) {
  std::vector<int> out(lift, 0);
  std::copy(exp.begin(), exp.end(), out.begin());
  return out;
}

// kappa lookup keyed by exponent vector
using KappaMap = std::map<std::vector<int>, int>;

KappaMap make_lookup(const std::vector<MonomialIndex>& kappa) {
  KappaMap m;
  for (std::size_t i = 0; i < kappa.size(); ++i) m.emplace(kappa[i].exp, static_cast<int>(i));
  return m;
}

int lookup(const KappaMap& m, const std::vector<int>& exp) {
  const auto it = m.find(exp);
  if (it == m.end()) throw ValidationError("moment assembly: monomial outside the kappa range");
  return it->second;
}

// Region polynomial lifted to `lift` variables (x variables come first).
Polynomial lift_poly(const Polynomial& g, int lift) {
  Polynomial out;
  out.terms.reserve(g.terms.size());
  for (const auto& t : g.terms) {
    std::vector<int> exp(lift, 0);
    std::copy(t.exp.begin(), t.exp.end(), exp.begin());
    out.terms.push_back({std::move(exp), t.coef});
  }
  return out;
}

// A ball-shaped constraint c0 - sum_j c_j x_j^2 with c0, c_j > 0 covering
// every location coordinate already certifies compactness.  ball_radius_sq
// extracts the tightest ||x||^2 bound those constraints imply.
bool is_ball(const Polynomial& g, int d, double* radius_sq) {
  double c0 = 0.0;
  std::vector<double> cj(d, 0.0);
  for (const auto& t : g.terms) {
    const int deg = std::accumulate(t.exp.begin(), t.exp.end(), 0);
    if (deg == 0) {
      c0 = t.coef;
      continue;
    }
    int var = -1;
    for (int j = 0; j < static_cast<int>(t.exp.size()); ++j)
      if (t.exp[j] != 0) {
        var = (t.exp[j] == 2 && var < 0) ? j : -2;
        if (var == -2) break;
      }
    if (var < 0 || var >= d || t.coef >= 0.0) return false;
    cj[var] = -t.coef;
  }
  if (c0 <= 0.0) return false;
  double cmin = std::numeric_limits<double>::infinity();
  for (double c : cj) cmin = std::min(cmin, c);
  if (cmin <= 0.0) return false;
  if (radius_sq) *radius_sq = c0 / cmin;
  return true;
}

bool has_ball(const std::vector<Polynomial>& region, int d) {
  for (const auto& g : region)
    if (is_ball(g, d, nullptr)) return true;
  return false;
}

double ball_radius_sq(const std::vector<Polynomial>& region, int d) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : region) {
    double r2 = 0.0;
    if (is_ball(g, d, &r2)) best = std::min(best, r2);
  }
  return best;
}

Polynomial archimedean_ball(const Instance& inst) {
  const double hi = std::max(inst.box_hi(), 1.0);
  Polynomial ball;
  ball.terms.push_back({std::vector<int>(inst.d, 0), inst.d * hi * hi});
  for (int j = 0; j < inst.d; ++j) {
    std::vector<int> exp(inst.d, 0);
    exp[j] = 2;
    ball.terms.push_back({std::move(exp), -1.0});
  }
  return ball;
}

// Working region: the instance constraints plus the compactness ball when no
// constraint already provides one.
std::vector<Polynomial> effective_region(const Instance& inst) {
  std::vector<Polynomial> region = inst.region;
  if (!has_ball(region, inst.d)) region.push_back(archimedean_ball(inst));
  return region;
}

int region_n0(const std::vector<Polynomial>& region) {
  int n0 = 1;
  for (const auto& g : region) n0 = std::max(n0, g.xi());
  return n0;
}

bool lambda_monotone_nonneg(const std::vector<double>& l) {
  for (std::size_t k = 0; k + 1 < l.size(); ++k)
    if (l[k] < l[k + 1]) return false;
  return !l.empty() && l.back() >= 0.0;
}

bool lambda_range_pattern(const std::vector<double>& l) {
  const std::size_t n = l.size();
  if (n < 2 || l[0] != 1.0 || l[n - 1] != -1.0) return false;
  for (std::size_t k = 1; k + 1 < n; ++k)
    if (l[k] != 0.0) return false;
  return true;
}

// Monomials over the clique (x_1..x_d, z_i) scattered into the full range
// lift (x, z, t_a, t_b) of d + n + 2 positions; pure-x monomials are skipped
// when skip_pure_x is set so cliques can share them through the common pool.
std::vector<MonomialIndex> clique_monomials(int d, int n, int point, int max_degree,
                                            bool skip_pure_x) {
  std::vector<MonomialIndex> local = enumerate_monomials(d + 1, max_degree);
  std::vector<MonomialIndex> out;
  out.reserve(local.size());
  for (const auto& m : local) {
    if (skip_pure_x && m.exp[d] == 0) continue;
    std::vector<int> exp(d + n + 2, 0);
    std::copy(m.exp.begin(), m.exp.begin() + d, exp.begin());
    exp[d + point] = m.exp[d];
    out.push_back({std::move(exp)});
  }
  return out;
}

struct Assembler {
  co::ConicProgram& prog;
  const KappaMap& kmap;
  int kcol0;

  int kappa_col(const std::vector<int>& exp) const { return kcol0 + lookup(kmap, exp); }

  // P = M(g kappa) over `basis`, entry-wise: svec slot ties to the kappa
  // combination with the svec sqrt(2) off-diagonal scale.
  void psd_block(const std::vector<MonomialIndex>& basis, const Polynomial& g) {
    const int m = static_cast<int>(basis.size());
    const int p0 = prog.add_cols(co::ConeKind::psd, m);
    for (int j = 0; j < m; ++j)
      for (int i = j; i < m; ++i) {
        const double scale = i == j ? 1.0 : kRt2;
        const int row = prog.add_row(0.0);
        prog.entry(row, p0 + co::svec_index(m, i, j), 1.0);
        const std::vector<int> base = exp_sum(basis[i].exp, basis[j].exp);
        for (const auto& t : g.terms)
          prog.entry(row, kappa_col(exp_sum(base, t.exp)), -scale * t.coef);
      }
  }

  // Order-zero localizing block: L(g) >= 0 as a slack row.
  void scalar_block(const Polynomial& g) {
    const int slack = prog.add_cols(co::ConeKind::nonneg, 1);
    const int row = prog.add_row(0.0);
    prog.entry(row, slack, -1.0);
    for (const auto& t : g.terms) prog.entry(row, kappa_col(t.exp), t.coef);
  }

  // L(g * m) = 0 for every monomial m of degree <= deg_cap over `basis_src`.
  void equality_ideal(const std::vector<MonomialIndex>& shifts, const Polynomial& g) {
    for (const auto& m : shifts) {
      const int row = prog.add_row(0.0);
      for (const auto& t : g.terms) prog.entry(row, kappa_col(exp_sum(m.exp, t.exp)), t.coef);
    }
  }

  void link(int structural_col, const std::vector<int>& exp) {
    const int row = prog.add_row(0.0);
    prog.entry(row, structural_col, 1.0);
    prog.entry(row, kappa_col(exp), -1.0);
  }
};

Polynomial constant_one(int lift) {
  Polynomial one;
  one.terms.push_back({std::vector<int>(lift, 0), 1.0});
  return one;
}

}  // namespace

int MonomialIndex::degree() const { return std::accumulate(exp.begin(), exp.end(), 0); }

bool graded_less(const MonomialIndex& a, const MonomialIndex& b) {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  return a.exp > b.exp;  // descending exponents within a degree
}

std::vector<MonomialIndex> enumerate_monomials(int nvars, int max_degree) {
  if (nvars < 1) throw ValidationError("enumerate_monomials: need at least one variable");
  if (max_degree < 0) throw ValidationError("enumerate_monomials: negative degree");
  std::vector<MonomialIndex> out;
  std::vector<int> exp(nvars, 0);
  for (int deg = 0; deg <= max_degree; ++deg) enumerate_exact(exp, 0, deg, out);
  return out;
}

HierarchySizes hierarchy_sizes(const Instance& inst, int order, Scope scope) {
  const int d = inst.d, n = inst.n();
  if (n == 0) throw ValidationError("hierarchy: empty instance");
  const std::vector<Polynomial> region = effective_region(inst);
  const int n0 = region_n0(region);
  if (order < n0)
    throw ValidationError("hierarchy: order " + std::to_string(order) +
                          " is below the minimum " + std::to_string(n0));

  HierarchySizes sz;
  if (lambda_range_pattern(inst.lambda)) {
    if (!inst.norm.is_l2())
      throw ValidationError("range wrap: only tau = 2 keeps the distance tie at degree 2");
    const int lv = d + 1;  // per-clique lifted variables
    sz.lift_dim = d + n + 2;
    sz.moment_dim = static_cast<int>(binom(lv + order, lv));
    // pool: shared x monomials, per-clique z_i-bearing ones, and the linear
    // t_a / t_b layers driven by the order-(N-1) epigraph localizers
    const long long xs = binom(d + 2 * order, d);
    const long long zmix = binom(lv + 2 * order, lv) - xs;
    const long long xs2 = binom(d + 2 * order - 2, d);
    const long long zmix2 = binom(lv + 2 * order - 2, lv) - xs2;
    sz.kappa_count = xs + n * zmix + 2 * (xs2 + n * zmix2);
    for (int i = 0; i < n; ++i) sz.psd_dims.push_back(sz.moment_dim);
    // five localizer families per point: z_i >= 0 and the order-statistic
    // pins t_a >= z_i, z_i >= t_b, R >= t_a, t_b >= 0; order-zero blocks
    // degenerate to rows and are not listed
    const int zdim = static_cast<int>(binom(lv + order - 1, lv));
    if (zdim >= 2)
      for (int f = 0; f < 5; ++f)
        for (int i = 0; i < n; ++i) sz.psd_dims.push_back(zdim);
    for (const auto& g : region) {
      const int dim = static_cast<int>(binom(d + order - g.xi(), d));
      if (dim >= 2) sz.psd_dims.push_back(dim);
    }
    return sz;
  }

  if (!lambda_monotone_nonneg(inst.lambda))
    throw ValidationError(
        "hierarchy: lambda is neither nonincreasing nonnegative nor the range pattern");
  if (scope == Scope::full && inst.norm.is_l1())
    throw ValidationError("hierarchy: full scope needs the power-form variables; tau = 1 has none");
  sz.lift_dim = scope == Scope::x_only ? d : 3 * n + (2 * n + 1) * d;
  sz.moment_dim = static_cast<int>(binom(sz.lift_dim + order, order));
  sz.kappa_count = binom(sz.lift_dim + 2 * order, 2 * order);
  sz.psd_dims.push_back(sz.moment_dim);
  for (const auto& g : region) {
    const int dim = static_cast<int>(binom(sz.lift_dim + order - g.xi(), order - g.xi()));
    if (dim >= 2) sz.psd_dims.push_back(dim);
  }
  return sz;
}

RangeWrap range_objective_wrap(const Instance& inst) {
  if (!lambda_range_pattern(inst.lambda))
    throw ValidationError("range wrap: lambda is not the range pattern (1, 0, ..., 0, -1)");
  if (!inst.norm.is_l2())
    throw ValidationError("range wrap: only tau = 2 keeps the distance tie at degree 2");
  const int d = inst.d, n = inst.n();
  RangeWrap rw;
  rw.lift_dim = d + n;
  rw.ties.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double w2 = inst.omega[i] * inst.omega[i];
    Polynomial q;  // z_i^2 - omega_i^2 ||x - a_i||^2
    std::vector<int> zz(rw.lift_dim, 0);
    zz[d + i] = 2;
    q.terms.push_back({std::move(zz), 1.0});
    double cst = 0.0;
    for (int j = 0; j < d; ++j) {
      const double a = inst.points[i][j];
      std::vector<int> sq(rw.lift_dim, 0), lin(rw.lift_dim, 0);
      sq[j] = 2;
      lin[j] = 1;
      q.terms.push_back({std::move(sq), -w2});
      if (a != 0.0) q.terms.push_back({std::move(lin), 2.0 * w2 * a});
      cst -= w2 * a * a;
    }
    if (cst != 0.0) q.terms.push_back({std::vector<int>(rw.lift_dim, 0), cst});
    rw.ties.push_back(std::move(q));
  }
  for (const auto& g : effective_region(inst)) rw.region.push_back(lift_poly(g, rw.lift_dim));
  return rw;
}

BuiltHierarchy build_hierarchy(const Instance& inst, int order, Scope scope, int psd_cap) {
  const int d = inst.d, n = inst.n();
  const HierarchySizes sz = hierarchy_sizes(inst, order, scope);  // validates order, n
  if (sz.moment_dim > psd_cap)
    throw ValidationError("hierarchy: moment matrix dimension " +
                          std::to_string(sz.moment_dim) + " exceeds the cap " +
                          std::to_string(psd_cap) +
                          "; raise the cap only for export-only builds");
  const std::vector<Polynomial> region = effective_region(inst);

  BuiltHierarchy bh;
  MomentProblem& mp = bh.mp;
  mp.scope = scope;
  mp.order = order;
  mp.n0 = region_n0(region);

  if (lambda_range_pattern(inst.lambda)) {
    const RangeWrap rw = range_objective_wrap(inst);
    co::ConicProgram& prog = bh.prog;
    mp.lift_dim = rw.lift_dim;

    const int x0 = prog.add_cols(co::ConeKind::free_, d);
    const int z0 = prog.add_cols(co::ConeKind::nonneg, n);
    const int t0 = prog.add_cols(co::ConeKind::free_, 2);  // t_max, t_min
    const int s0 = prog.add_cols(co::ConeKind::nonneg, 2 * n);
    prog.obj(t0, 1.0);
    prog.obj(t0 + 1, -1.0);
    for (int i = 0; i < n; ++i) {
      const int up = prog.add_row(0.0);  // t_max - z_i - s = 0
      prog.entry(up, t0, 1.0);
      prog.entry(up, z0 + i, -1.0);
      prog.entry(up, s0 + 2 * i, -1.0);
      const int dn = prog.add_row(0.0);  // z_i - t_min - s = 0
      prog.entry(dn, z0 + i, 1.0);
      prog.entry(dn, t0 + 1, -1.0);
      prog.entry(dn, s0 + 2 * i + 1, -1.0);
    }

    // kappa pool: shared x monomials plus each clique's z_i-bearing ones
    std::vector<MonomialIndex> kappa;
    for (const auto& m : enumerate_monomials(d, 2 * order))
      kappa.push_back({pad_exp(m.exp, mp.lift_dim)});
    for (int i = 0; i < n; ++i)
      for (auto& m : clique_monomials(d, n, i, 2 * order, /*skip_pure_x=*/true))
        kappa.push_back(std::move(m));
    std::sort(kappa.begin(), kappa.end(), graded_less);
    mp.kappa = std::move(kappa);
    mp.kcol0 = prog.add_cols(co::ConeKind::free_, static_cast<int>(mp.kappa.size()));
    const KappaMap kmap = make_lookup(mp.kappa);
    Assembler as{prog, kmap, mp.kcol0};

    const int k0row = prog.add_row(1.0);
    prog.entry(k0row, mp.kcol0, 1.0);
    for (int j = 0; j < d; ++j) {
      std::vector<int> e(mp.lift_dim, 0);
      e[j] = 1;
      as.link(x0 + j, e);
      mp.links.emplace_back(x0 + j, lookup(kmap, e));
    }
    for (int i = 0; i < n; ++i) {
      std::vector<int> e(mp.lift_dim, 0);
      e[d + i] = 1;
      as.link(z0 + i, e);
      mp.links.emplace_back(z0 + i, lookup(kmap, e));
    }

    // distance ties as moment equalities: L(q_i m) = 0 up to degree 2N
    for (int i = 0; i < n; ++i) {
      std::vector<MonomialIndex> shifts = clique_monomials(d, n, i, 2 * order - 2, false);
      as.equality_ideal(shifts, rw.ties[i]);
    }

    // scalar localizing rows first so the psd blocks stay trailing
    std::vector<MonomialIndex> xbasis;
    for (const auto& m : enumerate_monomials(d, order))
      xbasis.push_back({pad_exp(m.exp, mp.lift_dim)});
    for (const auto& g : rw.region) {
      const int ng = order - g.xi();
      if (static_cast<int>(binom(d + ng, d)) < 2) as.scalar_block(g);
    }
    for (int i = 0; i < n; ++i)
      as.psd_block(clique_monomials(d, n, i, order, false), constant_one(mp.lift_dim));
    // z_i >= 0 must localize, not just constrain the structural column: the
    // distance tie pins L(z_i^2) only, and without M_{N-1}(z_i mu) >= 0 the
    // first moment L(z_i) could sag below the distance and deflate the range.
    if (static_cast<int>(binom(d + order, d + 1)) >= 2)
      for (int i = 0; i < n; ++i) {
        Polynomial zi;
        std::vector<int> e(mp.lift_dim, 0);
        e[d + i] = 1;
        zi.terms.push_back({std::move(e), 1.0});
        as.psd_block(clique_monomials(d, n, i, order - 1, false), zi);
      }
    for (const auto& g : rw.region) {
      const int ng = order - g.xi();
      if (static_cast<int>(binom(d + ng, d)) >= 2) {
        std::vector<MonomialIndex> gb;
        for (const auto& m : enumerate_monomials(d, ng))
          gb.push_back({pad_exp(m.exp, mp.lift_dim)});
        as.psd_block(gb, g);
      }
    }

    mp.basis = xbasis;
    const int m = static_cast<int>(mp.basis.size());
    mp.mom_entry.assign(co::svec_dim(m), -1);
    for (int j = 0; j < m; ++j)
      for (int i = j; i < m; ++i)
        mp.mom_entry[co::svec_index(m, i, j)] =
            lookup(kmap, exp_sum(mp.basis[i].exp, mp.basis[j].exp));

    bh.vars.dim = d;
    bh.vars.n = n;
    bh.vars.x0 = x0;
    bh.vars.z0 = z0;
    co::canonicalize(prog);
    co::validate_program(prog);
    return bh;
  }

  rf::BuiltProgram base;  // lambda shape and tau were vetted by hierarchy_sizes
  if (scope == Scope::x_only) {
    base = inst.norm.is_l1()  ? rf::build_l1(inst)
           : inst.norm.is_l2() ? rf::build_l2(inst)
                               : rf::build_ordered(inst);
  } else {
    base = rf::build_ordered(inst);
  }
  co::ConicProgram& prog = bh.prog;
  prog = std::move(base.prog);
  bh.vars = base.vars;
  mp.lift_dim = sz.lift_dim;

  mp.kappa = enumerate_monomials(mp.lift_dim, 2 * order);
  mp.kcol0 = prog.add_cols(co::ConeKind::free_, static_cast<int>(mp.kappa.size()));
  const KappaMap kmap = make_lookup(mp.kappa);
  Assembler as{prog, kmap, mp.kcol0};

  const int k0row = prog.add_row(1.0);
  prog.entry(k0row, mp.kcol0, 1.0);

  // first-order links; lifted order is x, z, v, w, u, y
  std::vector<int> lift_col;
  lift_col.reserve(mp.lift_dim);
  for (int j = 0; j < d; ++j) lift_col.push_back(bh.vars.x0 + j);
  if (scope == Scope::full) {
    for (int i = 0; i < n; ++i) lift_col.push_back(bh.vars.z0 + i);
    for (int i = 0; i < n; ++i) lift_col.push_back(bh.vars.v0 + i);
    for (int i = 0; i < n; ++i) lift_col.push_back(bh.vars.w0 + i);
    for (int i = 0; i < n * d; ++i) lift_col.push_back(bh.vars.u0 + i);
    for (int i = 0; i < n * d; ++i) lift_col.push_back(bh.vars.y0 + i);
  }
  for (int t = 0; t < mp.lift_dim; ++t) {
    std::vector<int> e(mp.lift_dim, 0);
    e[t] = 1;
    as.link(lift_col[t], e);
    mp.links.emplace_back(lift_col[t], lookup(kmap, e));
  }

  std::vector<Polynomial> lifted;
  lifted.reserve(region.size());
  for (const auto& g : region) lifted.push_back(lift_poly(g, mp.lift_dim));

  for (std::size_t k = 0; k < lifted.size(); ++k) {
    const int ng = order - region[k].xi();
    if (static_cast<int>(binom(mp.lift_dim + ng, ng)) < 2) as.scalar_block(lifted[k]);
  }
  mp.basis = enumerate_monomials(mp.lift_dim, order);
  as.psd_block(mp.basis, constant_one(mp.lift_dim));
  for (std::size_t k = 0; k < lifted.size(); ++k) {
    const int ng = order - region[k].xi();
    if (static_cast<int>(binom(mp.lift_dim + ng, ng)) >= 2)
      as.psd_block(enumerate_monomials(mp.lift_dim, ng), lifted[k]);
  }

  const int m = static_cast<int>(mp.basis.size());
  mp.mom_entry.assign(co::svec_dim(m), -1);
  for (int j = 0; j < m; ++j)
    for (int i = j; i < m; ++i)
      mp.mom_entry[co::svec_index(m, i, j)] =
          lookup(kmap, exp_sum(mp.basis[i].exp, mp.basis[j].exp));

  co::canonicalize(prog);
  co::validate_program(prog);
  return bh;
}

std::vector<double> kappa_values(const co::SolveResult& res, const MomentProblem& mp) {
  if (mp.kcol0 < 0 ||
      mp.kcol0 + mp.kappa.size() > res.x.size())
    throw ValidationError("kappa_values: solution does not cover the moment block");
  return {res.x.begin() + mp.kcol0, res.x.begin() + mp.kcol0 + mp.kappa.size()};
}

FlatnessReport flatness_check(const std::vector<double>& moments, const MomentProblem& mp,
                              int n0, double rel_threshold) {
  if (moments.size() != mp.kappa.size())
    throw ValidationError("flatness: moment vector does not match the problem");
  if (n0 < 0 || n0 > mp.order) throw ValidationError("flatness: order gap out of range");

  const int m = static_cast<int>(mp.basis.size());
  int msub = 0;
  while (msub < m && mp.basis[msub].degree() <= mp.order - n0) ++msub;

  const auto rank_of = [&](int dim) {
    std::vector<double> a(dim * dim);
    for (int j = 0; j < dim; ++j)
      for (int i = j; i < dim; ++i) {
        const double v = moments[mp.mom_entry[co::svec_index(m, i, j)]];
        a[i * dim + j] = a[j * dim + i] = v;
      }
    std::vector<double> evals(dim), evecs(dim * dim);
    la::sym_eig(dim, a.data(), evals.data(), evecs.data());
    double top = 0.0;
    for (double e : evals) top = std::max(top, std::abs(e));
    if (top == 0.0) return 0;
    int rank = 0;
    for (double e : evals)
      if (std::abs(e) > rel_threshold * top) ++rank;
    return rank;
  };

  FlatnessReport rep;
  rep.rank_full = rank_of(m);
  rep.rank_sub = rank_of(msub);
  rep.flat = rep.rank_full == rep.rank_sub;
  rep.theta = rep.flat ? rep.rank_full : 0;
  return rep;
}

CandidateReport extract_candidate(const std::vector<double>& moments, const MomentProblem& mp,
                                  const Instance& inst, double bound) {
  if (moments.size() != mp.kappa.size())
    throw ValidationError("extract_candidate: moment vector does not match the problem");
  CandidateReport rep;
  rep.x.resize(inst.d);
  for (int j = 0; j < inst.d; ++j) {
    std::vector<int> e(mp.lift_dim, 0);
    e[j] = 1;
    const auto it = std::find_if(mp.kappa.begin(), mp.kappa.end(),
                                 [&](const MonomialIndex& mi) { return mi.exp == e; });
    if (it == mp.kappa.end())
      throw ValidationError("extract_candidate: first-order moment missing");
    rep.x[j] = moments[it - mp.kappa.begin()];
  }
  rep.margins.reserve(inst.region.size());
  for (const auto& g : inst.region) rep.margins.push_back(g.eval(rep.x));
  // active constraints come back O(solver tolerance) negative, not zero
  rep.feasible = std::all_of(rep.margins.begin(), rep.margins.end(),
                             [](double v) { return v >= -1e-6; });
  rep.objective = rf::ordered_value(inst, rep.x);
  rep.bound = bound;
  rep.eps = epsilon_obj(bound, rep.objective);
  return rep;
}

double epsilon_obj(double relaxation_value, double fopt) {
  return std::abs(relaxation_value - fopt) / std::max(1.0, fopt);
}

}  // namespace ordmed::mo
