#include "ordmed/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "ordmed/errors.hpp"

namespace ordmed::orc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// |t|^(r/s).  Product/sqrt fast paths cover the exponents the norm grid
// actually exercises; anything else falls back to std::pow.
double abs_pow(double t, std::int64_t r, std::int64_t s, double rs) {
  const double a = std::abs(t);
  if (s == 1) {
    switch (r) {
      case 1: return a;
      case 2: return a * a;
      case 3: return a * a * a;
      case 4: { const double q = a * a; return q * q; }
      default: break;
    }
  } else if (s == 2) {
    const double q = std::sqrt(a);
    switch (r) {
      case 1: return q;
      case 3: return a * q;
      case 5: return a * a * q;
      case 7: return a * a * a * q;
      default: break;
    }
  }
  return std::pow(a, rs);
}

double norm_tau(const double* u, int d, const RationalNorm& nm) {
  if (nm.is_l1()) {
    double acc = 0.0;
    for (int j = 0; j < d; ++j) acc += std::abs(u[j]);
    return acc;
  }
  if (nm.is_l2()) {
    double acc = 0.0;
    for (int j = 0; j < d; ++j) acc += u[j] * u[j];
    return std::sqrt(acc);
  }
  const double tau = nm.tau();
  double acc = 0.0;
  for (int j = 0; j < d; ++j) acc += abs_pow(u[j], nm.r, nm.s, tau);
  return std::pow(acc, 1.0 / tau);
}

// Weighted distances, the nonincreasing permutation (ties by index), and the
// sorted dot with lambda, in one pass.  scratch buffers avoid reallocation in
// the grid and subgradient loops.
struct Evaluator {
  const Instance& inst;
  std::vector<double> dist;
  std::vector<int> order;
  std::vector<double> diff;

  explicit Evaluator(const Instance& i)
      : inst(i), dist(i.n()), order(i.n()), diff(i.d) {}

  double operator()(const std::vector<double>& x) {
    const int n = inst.n(), d = inst.d;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) diff[j] = x[j] - inst.points[i][j];
      dist[i] = inst.omega[i] * norm_tau(diff.data(), d, inst.norm);
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return dist[a] > dist[b]; });
    double val = 0.0;
    for (int k = 0; k < n; ++k) val += inst.lambda[k] * dist[order[k]];
    return val;
  }
};

void check_location(const Instance& inst, const std::vector<double>& x) {
  if (inst.n() == 0) throw ValidationError("oracle: empty instance");
  if (static_cast<int>(x.size()) != inst.d)
    throw ValidationError("oracle: location has the wrong dimension");
}

bool lambda_all_ones(const Instance& inst) {
  for (double l : inst.lambda)
    if (l != 1.0) return false;
  return true;
}

bool lambda_monotone_nonneg(const Instance& inst) {
  const auto& l = inst.lambda;
  for (std::size_t k = 0; k + 1 < l.size(); ++k)
    if (l[k] < l[k + 1]) return false;
  return !l.empty() && l.back() >= 0.0;
}

void demand_hull(const Instance& inst, std::vector<double>& lo, std::vector<double>& hi) {
  const int n = inst.n(), d = inst.d;
  lo.assign(d, kInf);
  hi.assign(d, -kInf);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], inst.points[i][j]);
      hi[j] = std::max(hi[j], inst.points[i][j]);
    }
}

bool region_ok(const Instance& inst, const std::vector<double>& x) {
  for (const auto& g : inst.region)
    if (g.eval(x) < 0.0) return false;
  return true;
}

}  // namespace

double objective(const Instance& inst, const std::vector<double>& x) {
  check_location(inst, x);
  Evaluator eval(inst);
  return eval(x);
}

OracleReport weiszfeld(const Instance& inst, int max_iter, double tol) {
  if (inst.n() == 0) throw ValidationError("weiszfeld: empty instance");
  if (!inst.norm.is_l2()) throw ValidationError("weiszfeld: requires tau == 2");
  if (!lambda_all_ones(inst)) throw ValidationError("weiszfeld: requires lambda identically one");

  const int n = inst.n(), d = inst.d;
  std::vector<double> x(d, 0.0);
  double wsum = 0.0;
  for (int i = 0; i < n; ++i) {
    wsum += inst.omega[i];
    for (int j = 0; j < d; ++j) x[j] += inst.omega[i] * inst.points[i][j];
  }
  if (wsum <= 0.0) throw ValidationError("weiszfeld: weights sum to zero");
  for (int j = 0; j < d; ++j) x[j] /= wsum;

  Evaluator eval(inst);
  double fx = eval(x);
  std::vector<double> xn(d), diff(d);
  int it = 0;
  for (; it < max_iter; ++it) {
    // Vertex handling: merged weight of coincident demand points against the
    // pull of the rest.  Optimal iff the pull is no stronger than the weight.
    int at = -1;
    for (int i = 0; i < n && at < 0; ++i) {
      double nr = 0.0;
      for (int j = 0; j < d; ++j) {
        const double t = x[j] - inst.points[i][j];
        nr += t * t;
      }
      if (std::sqrt(nr) <= 1e-12) at = i;
    }
    if (at >= 0) {
      double wk = 0.0, lip = 0.0;
      std::vector<double> pull(d, 0.0);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) diff[j] = inst.points[at][j] - inst.points[i][j];
        const double nr = norm_tau(diff.data(), d, inst.norm);
        if (nr <= 1e-12) {
          wk += inst.omega[i];
          continue;
        }
        for (int j = 0; j < d; ++j) pull[j] += inst.omega[i] * diff[j] / nr;
        lip += inst.omega[i] / nr;
      }
      double pn = 0.0;
      for (int j = 0; j < d; ++j) pn += pull[j] * pull[j];
      pn = std::sqrt(pn);
      if (pn <= wk || lip <= 0.0) {
        for (int j = 0; j < d; ++j) x[j] = inst.points[at][j];
        break;
      }
      const double step = (pn - wk) / lip;
      for (int j = 0; j < d; ++j) xn[j] = inst.points[at][j] - step * pull[j] / pn;
      const double fn = eval(xn);
      if (fn > fx) {  // roundoff floor, settle on the vertex itself
        for (int j = 0; j < d; ++j) x[j] = inst.points[at][j];
        break;
      }
      x = xn;
      fx = fn;
      continue;
    }

    double num_w = 0.0;
    xn.assign(d, 0.0);
    for (int i = 0; i < n; ++i) {
      double nr = 0.0;
      for (int j = 0; j < d; ++j) {
        const double t = x[j] - inst.points[i][j];
        nr += t * t;
      }
      const double w = inst.omega[i] / std::sqrt(nr);
      num_w += w;
      for (int j = 0; j < d; ++j) xn[j] += w * inst.points[i][j];
    }
    double stepn = 0.0;
    for (int j = 0; j < d; ++j) {
      xn[j] /= num_w;
      const double t = xn[j] - x[j];
      stepn += t * t;
    }
    const double fn = eval(xn);
    if (fn > fx) break;  // descent exhausted by roundoff
    x = xn;
    fx = fn;
    if (std::sqrt(stepn) < tol) break;
  }

  OracleReport rep;
  rep.method = "weiszfeld";
  rep.point = x;
  rep.value = objective(inst, x);
  rep.evaluations = it + 1;
  return rep;
}

OracleReport subgradient_solve(const Instance& inst, int iters, std::uint64_t seed) {
  if (inst.n() == 0) throw ValidationError("subgradient_solve: empty instance");
  if (!lambda_monotone_nonneg(inst))
    throw ValidationError("subgradient_solve: requires nonincreasing nonnegative lambda");

  const int n = inst.n(), d = inst.d;
  std::vector<double> lo, hi;
  demand_hull(inst, lo, hi);
  double diag = 0.0;
  for (int j = 0; j < d; ++j) diag += (hi[j] - lo[j]) * (hi[j] - lo[j]);
  diag = std::sqrt(diag);

  std::vector<double> centroid(d, 0.0);
  double wsum = 0.0;
  for (int i = 0; i < n; ++i) {
    wsum += inst.omega[i];
    for (int j = 0; j < d; ++j) centroid[j] += inst.omega[i] * inst.points[i][j];
  }
  for (int j = 0; j < d; ++j) centroid[j] = wsum > 0.0 ? centroid[j] / wsum : centroid[j];

  const double tau = inst.norm.tau();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Evaluator eval(inst);
  OracleReport rep;
  rep.method = "subgradient";
  rep.value = kInf;
  std::vector<double> x(d), g(d), diff(d);
  constexpr int kStarts = 8;
  for (int start = 0; start < kStarts; ++start) {
    if (start == 0) {
      x = centroid;
    } else {
      for (int j = 0; j < d; ++j) x[j] = lo[j] + unif(rng) * (hi[j] - lo[j]);
    }
    for (int t = 1; t <= iters; ++t) {
      const double fx = eval(x);
      ++rep.evaluations;
      if (fx < rep.value) {
        rep.value = fx;
        rep.point = x;
      }
      // Subgradient of the sorted objective at the incumbent permutation.
      g.assign(d, 0.0);
      for (int k = 0; k < n; ++k) {
        const double lam = inst.lambda[k];
        if (lam == 0.0) continue;
        const int i = eval.order[k];
        if (eval.dist[i] <= 0.0 || inst.omega[i] == 0.0) continue;
        const double nr = eval.dist[i] / inst.omega[i];
        const double wl = lam * inst.omega[i];
        if (inst.norm.is_l1()) {
          for (int j = 0; j < d; ++j) {
            const double u = x[j] - inst.points[i][j];
            if (u != 0.0) g[j] += wl * (u > 0.0 ? 1.0 : -1.0);
          }
        } else if (inst.norm.is_l2()) {
          for (int j = 0; j < d; ++j) g[j] += wl * (x[j] - inst.points[i][j]) / nr;
        } else {
          const double den = abs_pow(nr, inst.norm.r - inst.norm.s, inst.norm.s, tau - 1.0);
          for (int j = 0; j < d; ++j) {
            const double u = x[j] - inst.points[i][j];
            if (u == 0.0) continue;
            const double m = abs_pow(u, inst.norm.r - inst.norm.s, inst.norm.s, tau - 1.0) / den;
            g[j] += wl * (u > 0.0 ? m : -m);
          }
        }
      }
      double gn = 0.0;
      for (int j = 0; j < d; ++j) gn += g[j] * g[j];
      if (gn == 0.0) break;  // stationary, hence optimal on this convex objective
      const double step = diag / std::sqrt(static_cast<double>(t));
      for (int j = 0; j < d; ++j)
        x[j] = std::clamp(x[j] - step * g[j], lo[j], hi[j]);
    }
  }
  if (rep.point.empty()) rep.point = centroid;
  rep.value = objective(inst, rep.point);
  return rep;
}

OracleReport grid_refine(const Instance& inst, const std::vector<double>& lo,
                         const std::vector<double>& hi, int levels) {
  if (inst.n() == 0) throw ValidationError("grid_refine: empty instance");
  const int d = inst.d;
  if (d > 3) throw ValidationError("grid_refine: dimension above 3");
  if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d)
    throw ValidationError("grid_refine: box has the wrong dimension");
  for (int j = 0; j < d; ++j)
    if (!(lo[j] <= hi[j])) throw ValidationError("grid_refine: empty box");
  if (levels < 1) throw ValidationError("grid_refine: levels must be positive");

  constexpr int kNodes = 21;
  Evaluator eval(inst);
  OracleReport rep;
  rep.method = "grid";
  rep.value = kInf;
  std::vector<double> cur_lo = lo, cur_hi = hi, x(d);
  std::vector<int> idx(d);
  for (int level = 0; level < levels; ++level) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      for (int j = 0; j < d; ++j)
        x[j] = cur_lo[j] + idx[j] * (cur_hi[j] - cur_lo[j]) / (kNodes - 1);
      if (region_ok(inst, x)) {
        const double v = eval(x);
        ++rep.evaluations;
        if (v < rep.value) {
          rep.value = v;
          rep.point = x;
        }
      }
      int j = 0;
      while (j < d && ++idx[j] == kNodes) idx[j++] = 0;
      if (j == d) break;
    }
    if (rep.point.empty())
      throw VerifyError("grid_refine: no feasible grid point in the box");
    // Recenter on the incumbent and shrink tenfold, staying inside [lo, hi].
    for (int j = 0; j < d; ++j) {
      const double w = (cur_hi[j] - cur_lo[j]) / 10.0;
      cur_lo[j] = std::clamp(rep.point[j] - w / 2.0, lo[j], hi[j] - w);
      cur_hi[j] = cur_lo[j] + w;
    }
  }
  rep.value = objective(inst, rep.point);
  return rep;
}

OracleReport grid_refine(const Instance& inst, int levels) {
  std::vector<double> lo, hi;
  demand_hull(inst, lo, hi);
  return grid_refine(inst, lo, hi, levels);
}

OracleReport cross_check(const Instance& inst, const so::LocationSolution& candidate, double tol) {
  if (!inst.region.empty())
    throw VerifyError("cross_check: constrained instance needs an explicit box; use grid_refine");
  OracleReport ref;
  if (inst.norm.is_l2() && lambda_all_ones(inst)) {
    ref = weiszfeld(inst);
  } else if (inst.d <= 3) {
    ref = grid_refine(inst);
  } else if (lambda_monotone_nonneg(inst)) {
    ref = subgradient_solve(inst);
  } else {
    throw VerifyError("cross_check: no applicable oracle");
  }
  const double cand = objective(inst, candidate.x);
  ref.gap = std::abs(cand - ref.value) / std::max(1.0, std::abs(ref.value));
  ref.pass = ref.gap <= tol;
  return ref;
}

}  // namespace ordmed::orc
