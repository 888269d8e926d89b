#include "ordmed/solver.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ordmed/errors.hpp"
#include "ordmed/kernels.hpp"
#include "ordmed/linalg.hpp"
#include "ordmed/reduce.hpp"

namespace ordmed::so {
namespace {

using co::ConeKind;
using co::ReducedForm;
using co::RowCone;
using co::SolveResult;
using co::SolveStatus;
using co::Triplet;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDelta = 1e-9;     // static regularization on the augmented diagonal
constexpr double kDeltaMax = 1e-3;  // largest regularization tried before giving up
constexpr double kPivReg = 1e-12;   // pivot clamp inside the factorizations
constexpr double kStepBack = 0.99;
constexpr double kQualTol = 1e-7;  // largest acceptable relative residual of a KKT solve
constexpr int kRefineRounds = 10;

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Small dense helpers, row-major p x p.

void mm(int p, const double* A, bool ta, const double* B, bool tb, double* C) {
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      double acc = 0.0;
      if (!ta && !tb)
        for (int k = 0; k < p; ++k) acc += A[i * p + k] * B[k * p + j];
      else if (!ta && tb)
        for (int k = 0; k < p; ++k) acc += A[i * p + k] * B[j * p + k];
      else if (ta && !tb)
        for (int k = 0; k < p; ++k) acc += A[k * p + i] * B[k * p + j];
      else
        for (int k = 0; k < p; ++k) acc += A[k * p + i] * B[j * p + k];
      C[i * p + j] = acc;
    }
}

// ---------------------------------------------------------------------------
// Nesterov-Todd scaling state, one per row cone. The scaled point is
// lam = W z = W^{-T} s; for psd cones W is kept in factored form (R, R^{-1})
// and lam is diagonal with entries lam_diag.

struct Scale {
  ConeKind kind = ConeKind::nonneg;
  int off = 0, dim = 0, size = 0;
  std::vector<double> w;             // nonneg
  double eta = 1.0;                  // soc
  std::vector<double> wbar, u;       // soc
  std::vector<double> R, Ri, T, Ti;  // psd, size*size row-major
  std::vector<double> lam;           // scaled point, svec coordinates
  std::vector<double> lam_diag;      // psd eigenvalues of the scaled point
  mutable std::vector<double> m1, m2, m3;
};

std::vector<Scale> make_scales(const ReducedForm& rf) {
  std::vector<Scale> sc;
  sc.reserve(rf.rows.size());
  for (const RowCone& rc : rf.rows) {
    Scale s;
    s.kind = rc.kind;
    s.off = rc.offset;
    s.dim = rc.dim;
    s.size = rc.size;
    s.lam.assign(rc.dim, 0.0);
    switch (rc.kind) {
      case ConeKind::nonneg:
        s.w.assign(rc.dim, 1.0);
        s.lam.assign(rc.dim, 1.0);
        break;
      case ConeKind::soc:
        s.wbar.assign(rc.dim, 0.0);
        s.u.assign(rc.dim, 0.0);
        s.wbar[0] = s.u[0] = 1.0;
        s.lam[0] = 1.0;
        break;
      case ConeKind::psd: {
        const int p = rc.size;
        s.R.assign(p * p, 0.0);
        s.Ri.assign(p * p, 0.0);
        s.T.assign(p * p, 0.0);
        s.Ti.assign(p * p, 0.0);
        for (int i = 0; i < p; ++i) s.R[i * p + i] = s.Ri[i * p + i] = 1.0;
        s.T = s.R;
        s.Ti = s.R;
        s.lam_diag.assign(p, 1.0);
        for (int i = 0; i < p; ++i) s.lam[co::svec_index(p, i, i)] = 1.0;
        s.m1.assign(p * p, 0.0);
        s.m2.assign(p * p, 0.0);
        s.m3.assign(p * p, 0.0);
        break;
      }
      default:
        throw ValidationError("solver: unexpected cone kind " + co::cone_name(rc.kind));
    }
    sc.push_back(std::move(s));
  }
  return sc;
}

bool compute_scaling(Scale& sc, const double* s, const double* z) {
  switch (sc.kind) {
    case ConeKind::nonneg:
      for (int i = 0; i < sc.dim; ++i) {
        if (!(s[i] > 0.0) || !(z[i] > 0.0)) return false;
        sc.w[i] = std::sqrt(s[i] / z[i]);
        sc.lam[i] = std::sqrt(s[i] * z[i]);
      }
      return true;
    case ConeKind::soc: {
      const int q = sc.dim;
      const double sres2 = s[0] * s[0] - kern::nrm2sq(s + 1, q - 1);
      const double zres2 = z[0] * z[0] - kern::nrm2sq(z + 1, q - 1);
      if (!(sres2 > 0.0) || !(zres2 > 0.0) || !(s[0] > 0.0) || !(z[0] > 0.0)) return false;
      const double snorm = std::sqrt(sres2), znorm = std::sqrt(zres2);
      std::vector<double> sbar(q), zbar(q);
      for (int i = 0; i < q; ++i) sbar[i] = s[i] / snorm;
      for (int i = 0; i < q; ++i) zbar[i] = z[i] / znorm;
      const double gamma = std::sqrt((1.0 + kern::dot(sbar.data(), zbar.data(), q)) / 2.0);
      if (!(gamma > 0.0)) return false;
      // wbar = (sbar + J zbar) / (2 gamma), a unit-hyperbolic point mapping
      // zbar to sbar under 2 wbar wbar' - J.
      sc.wbar[0] = (sbar[0] + zbar[0]) / (2.0 * gamma);
      for (int i = 1; i < q; ++i) sc.wbar[i] = (sbar[i] - zbar[i]) / (2.0 * gamma);
      sc.eta = std::sqrt(snorm / znorm);
      // Jordan square root of eta * wbar: W = 2 u u' - eta J satisfies W^2 z = s.
      const double u0 = std::sqrt((sc.eta * sc.wbar[0] + sc.eta) / 2.0);
      sc.u[0] = u0;
      for (int i = 1; i < q; ++i) sc.u[i] = sc.eta * sc.wbar[i] / (2.0 * u0);
      const double udz = kern::dot(sc.u.data(), z, q);
      sc.lam[0] = 2.0 * sc.u[0] * udz - sc.eta * z[0];
      for (int i = 1; i < q; ++i) sc.lam[i] = 2.0 * sc.u[i] * udz + sc.eta * z[i];
      return sc.lam[0] > 0.0;
    }
    case ConeKind::psd: {
      const int p = sc.size;
      std::vector<double>&S = sc.m1, &Z = sc.m2;
      S.resize(p * p);
      Z.resize(p * p);
      co::svec_to_mat(s, S.data(), p);
      co::svec_to_mat(z, Z.data(), p);
      std::vector<double> theta(p), Us(p * p);
      la::sym_eig(p, S.data(), theta.data(), Us.data());
      for (double t : theta)
        if (!(t > 0.0)) return false;
      // Q = S^{1/2}, Qi = S^{-1/2}
      std::vector<double> tmp(p * p), Q(p * p), Qi(p * p);
      for (int i = 0; i < p; ++i)
        for (int k = 0; k < p; ++k) tmp[i * p + k] = Us[i * p + k] * std::sqrt(theta[k]);
      mm(p, tmp.data(), false, Us.data(), true, Q.data());
      for (int i = 0; i < p; ++i)
        for (int k = 0; k < p; ++k) tmp[i * p + k] = Us[i * p + k] / std::sqrt(theta[k]);
      mm(p, tmp.data(), false, Us.data(), true, Qi.data());
      // M = Q Z Q, eigensystem gives the NT congruence factors.
      std::vector<double> M(p * p);
      mm(p, Q.data(), false, Z.data(), false, tmp.data());
      mm(p, tmp.data(), false, Q.data(), false, M.data());
      std::vector<double> mu(p), E(p * p);
      la::sym_eig(p, M.data(), mu.data(), E.data());
      for (double m : mu)
        if (!(m > 0.0)) return false;
      std::vector<double> F(p * p), Fi(p * p);
      mm(p, Q.data(), false, E.data(), false, F.data());
      mm(p, Qi.data(), false, E.data(), false, Fi.data());
      for (int i = 0; i < p; ++i)
        for (int k = 0; k < p; ++k) sc.R[i * p + k] = F[i * p + k] * std::pow(mu[k], -0.25);
      for (int i = 0; i < p; ++i)
        for (int k = 0; k < p; ++k) sc.Ri[i * p + k] = std::pow(mu[i], 0.25) * Fi[k * p + i];
      for (int i = 0; i < p; ++i)
        for (int k = 0; k < p; ++k) tmp[i * p + k] = F[i * p + k] / std::sqrt(mu[k]);
      mm(p, tmp.data(), false, F.data(), true, sc.T.data());
      for (int i = 0; i < p; ++i)
        for (int k = 0; k < p; ++k) tmp[i * p + k] = Fi[i * p + k] * std::sqrt(mu[k]);
      mm(p, tmp.data(), false, Fi.data(), true, sc.Ti.data());
      for (int i = 0; i < p; ++i) {
        sc.lam_diag[i] = std::sqrt(mu[i]);
        for (int j = 0; j <= i; ++j)
          sc.lam[co::svec_index(p, i, j)] = (i == j) ? sc.lam_diag[i] : 0.0;
      }
      return true;
    }
    default:
      return false;
  }
}

void psd_congruence(const Scale& sc, const double* Mfac, bool transpose_first, const double* v,
                    double* out) {
  const int p = sc.size;
  co::svec_to_mat(v, sc.m1.data(), p);
  if (transpose_first) {  // svec(M' V M)
    mm(p, Mfac, true, sc.m1.data(), false, sc.m2.data());
    mm(p, sc.m2.data(), false, Mfac, false, sc.m3.data());
  } else {  // svec(M V M')
    mm(p, Mfac, false, sc.m1.data(), false, sc.m2.data());
    mm(p, sc.m2.data(), false, Mfac, true, sc.m3.data());
  }
  co::mat_to_svec(sc.m3.data(), out, p);
}

// z-side scaling: out = W z.
void scale_z(const Scale& sc, const double* v, double* out) {
  switch (sc.kind) {
    case ConeKind::nonneg:
      for (int i = 0; i < sc.dim; ++i) out[i] = sc.w[i] * v[i];
      return;
    case ConeKind::soc: {
      const double a = kern::dot(sc.u.data(), v, sc.dim);
      out[0] = 2.0 * sc.u[0] * a - sc.eta * v[0];
      for (int i = 1; i < sc.dim; ++i) out[i] = 2.0 * sc.u[i] * a + sc.eta * v[i];
      return;
    }
    case ConeKind::psd:
      psd_congruence(sc, sc.R.data(), true, v, out);  // svec(R' V R)
      return;
    default:
      return;
  }
}

// s-side scaling: out = W^{-T} s.
void scale_s(const Scale& sc, const double* v, double* out) {
  switch (sc.kind) {
    case ConeKind::nonneg:
      for (int i = 0; i < sc.dim; ++i) out[i] = v[i] / sc.w[i];
      return;
    case ConeKind::soc: {
      // W^{-1} = (2 (Ju)(Ju)' - eta J) / eta^2
      const int q = sc.dim;
      double a = sc.u[0] * v[0];
      for (int i = 1; i < q; ++i) a -= sc.u[i] * v[i];
      const double e2 = sc.eta * sc.eta;
      out[0] = (2.0 * sc.u[0] * a - sc.eta * v[0]) / e2;
      for (int i = 1; i < q; ++i) out[i] = (-2.0 * sc.u[i] * a + sc.eta * v[i]) / e2;
      return;
    }
    case ConeKind::psd:
      psd_congruence(sc, sc.Ri.data(), false, v, out);  // svec(Ri V Ri')
      return;
    default:
      return;
  }
}

// out = W^T g, the inverse of the s-side scaling.
void apply_WT(const Scale& sc, const double* v, double* out) {
  switch (sc.kind) {
    case ConeKind::nonneg:
      for (int i = 0; i < sc.dim; ++i) out[i] = sc.w[i] * v[i];
      return;
    case ConeKind::soc:
      scale_z(sc, v, out);  // W symmetric
      return;
    case ConeKind::psd:
      psd_congruence(sc, sc.R.data(), false, v, out);  // svec(R V R')
      return;
    default:
      return;
  }
}

// out = W^T W v, the KKT block.
void apply_Wsq(const Scale& sc, const double* v, double* out) {
  switch (sc.kind) {
    case ConeKind::nonneg:
      for (int i = 0; i < sc.dim; ++i) out[i] = sc.w[i] * sc.w[i] * v[i];
      return;
    case ConeKind::soc: {
      const double a = kern::dot(sc.wbar.data(), v, sc.dim);
      const double e2 = sc.eta * sc.eta;
      out[0] = e2 * (2.0 * sc.wbar[0] * a - v[0]);
      for (int i = 1; i < sc.dim; ++i) out[i] = e2 * (2.0 * sc.wbar[i] * a + v[i]);
      return;
    }
    case ConeKind::psd:
      psd_congruence(sc, sc.T.data(), false, v, out);  // svec(T V T), T symmetric
      return;
    default:
      return;
  }
}

void apply_Wsq_inv(const Scale& sc, const double* v, double* out) {
  switch (sc.kind) {
    case ConeKind::nonneg:
      for (int i = 0; i < sc.dim; ++i) out[i] = v[i] / (sc.w[i] * sc.w[i]);
      return;
    case ConeKind::soc: {
      // (W^2)^{-1} = (2 (J wbar)(J wbar)' - J) / eta^2
      const int q = sc.dim;
      double a = sc.wbar[0] * v[0];
      for (int i = 1; i < q; ++i) a -= sc.wbar[i] * v[i];
      const double e2 = sc.eta * sc.eta;
      out[0] = (2.0 * sc.wbar[0] * a - v[0]) / e2;
      for (int i = 1; i < q; ++i) out[i] = (-2.0 * sc.wbar[i] * a + v[i]) / e2;
      return;
    }
    case ConeKind::psd:
      psd_congruence(sc, sc.Ti.data(), false, v, out);
      return;
    default:
      return;
  }
}

// Jordan product in the scaled space.
void jprod(const Scale& sc, const double* a, const double* b, double* out) {
  switch (sc.kind) {
    case ConeKind::nonneg:
      for (int i = 0; i < sc.dim; ++i) out[i] = a[i] * b[i];
      return;
    case ConeKind::soc: {
      const double dotab = kern::dot(a, b, sc.dim);
      for (int i = 1; i < sc.dim; ++i) out[i] = a[0] * b[i] + b[0] * a[i];
      out[0] = dotab;
      return;
    }
    case ConeKind::psd: {
      const int p = sc.size;
      std::vector<double> A(p * p), B(p * p), C(p * p);
      co::svec_to_mat(a, A.data(), p);
      co::svec_to_mat(b, B.data(), p);
      mm(p, A.data(), false, B.data(), false, C.data());
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < i; ++j) {
          const double sym = 0.5 * (C[i * p + j] + C[j * p + i]);
          C[i * p + j] = C[j * p + i] = sym;
        }
      co::mat_to_svec(C.data(), out, p);
      return;
    }
    default:
      return;
  }
}

// Solves lam o x = v for x.
void jdiv_lambda(const Scale& sc, const double* v, double* out) {
  switch (sc.kind) {
    case ConeKind::nonneg:
      for (int i = 0; i < sc.dim; ++i) out[i] = v[i] / sc.lam[i];
      return;
    case ConeKind::soc: {
      const int q = sc.dim;
      const double det = sc.lam[0] * sc.lam[0] - kern::nrm2sq(sc.lam.data() + 1, q - 1);
      const double l1v1 = kern::dot(sc.lam.data() + 1, v + 1, q - 1);
      out[0] = (sc.lam[0] * v[0] - l1v1) / det;
      for (int i = 1; i < q; ++i) out[i] = (v[i] - out[0] * sc.lam[i]) / sc.lam[0];
      return;
    }
    case ConeKind::psd: {
      const int p = sc.size;
      co::svec_to_mat(v, sc.m1.data(), p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
          sc.m1[i * p + j] *= 2.0 / (sc.lam_diag[i] + sc.lam_diag[j]);
      co::mat_to_svec(sc.m1.data(), out, p);
      return;
    }
    default:
      return;
  }
}

void unit_e(const Scale& sc, double* out) {
  std::fill(out, out + sc.dim, 0.0);
  switch (sc.kind) {
    case ConeKind::nonneg:
      std::fill(out, out + sc.dim, 1.0);
      return;
    case ConeKind::soc:
      out[0] = 1.0;
      return;
    case ConeKind::psd:
      for (int i = 0; i < sc.size; ++i) out[co::svec_index(sc.size, i, i)] = 1.0;
      return;
    default:
      return;
  }
}

// Negative distance to the cone boundary; v is strictly interior iff < 0.
double cone_violation(ConeKind kind, int size, const double* v, int dim) {
  switch (kind) {
    case ConeKind::nonneg: {
      double m = -kInf;
      for (int i = 0; i < dim; ++i) m = std::max(m, -v[i]);
      return m;
    }
    case ConeKind::soc:
      return std::sqrt(kern::nrm2sq(v + 1, dim - 1)) - v[0];
    case ConeKind::psd: {
      std::vector<double> M(size * size), ev(size), evec(size * size);
      co::svec_to_mat(v, M.data(), size);
      la::sym_eig(size, M.data(), ev.data(), evec.data());
      return -ev[0];
    }
    default:
      return -kInf;
  }
}

// Largest t with lam + t d in the cone (scaled space), possibly kInf.
double max_step(const Scale& sc, const double* d) {
  switch (sc.kind) {
    case ConeKind::nonneg: {
      double t = kInf;
      for (int i = 0; i < sc.dim; ++i)
        if (d[i] < 0.0) t = std::min(t, -sc.lam[i] / d[i]);
      return t;
    }
    case ConeKind::soc: {
      const int q = sc.dim;
      const double A = d[0] * d[0] - kern::nrm2sq(d + 1, q - 1);
      const double B = sc.lam[0] * d[0] - kern::dot(sc.lam.data() + 1, d + 1, q - 1);
      const double C = sc.lam[0] * sc.lam[0] - kern::nrm2sq(sc.lam.data() + 1, q - 1);
      if (std::abs(A) < 1e-300) {
        if (B >= 0.0) return kInf;
        return -C / (2.0 * B);
      }
      const double disc = B * B - A * C;
      if (A > 0.0) {
        if (B >= 0.0 || disc <= 0.0) return kInf;
        return (-B - std::sqrt(disc)) / A;
      }
      return (-B - std::sqrt(std::max(0.0, disc))) / A;
    }
    case ConeKind::psd: {
      const int p = sc.size;
      co::svec_to_mat(d, sc.m1.data(), p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
          sc.m1[i * p + j] /= std::sqrt(sc.lam_diag[i] * sc.lam_diag[j]);
      std::vector<double> ev(p), evec(p * p);
      la::sym_eig(p, sc.m1.data(), ev.data(), evec.data());
      if (ev[0] >= 0.0) return kInf;
      return -1.0 / ev[0];
    }
    default:
      return kInf;
  }
}

// ---------------------------------------------------------------------------
// Sparse matrix-vector products over the reduced form.

void mult_at(const ReducedForm& rf, const std::vector<double>& y, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const Triplet& t : rf.Aeq) out[t.col] += t.val * y[t.row];
}
void mult_a(const ReducedForm& rf, const std::vector<double>& x, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const Triplet& t : rf.Aeq) out[t.row] += t.val * x[t.col];
}
void mult_gt(const ReducedForm& rf, const std::vector<double>& z, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const Triplet& t : rf.G) out[t.col] += t.val * z[t.row];
}
void mult_g(const ReducedForm& rf, const std::vector<double>& x, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const Triplet& t : rf.G) out[t.row] += t.val * x[t.col];
}

// ---------------------------------------------------------------------------
// KKT system  [0 A' G'; A 0 0; G 0 -W'W]  with static regularization.
// Without psd cones the augmented system is factored as a node graph: columns,
// equality rows, and cone rows are all nodes; min-degree elimination clears
// the sparse periphery and a dense LDL' takes the core. With psd cones all
// cone rows are folded into the structural block through the normal equations
// (the psd fold is a syrk on W^{-1}-scaled columns) and a dense LDL' of size
// nx + neq is factored instead.

class Kkt {
 public:
  void analyze(const ReducedForm& rf) {
    rf_ = &rf;
    nx_ = rf.nx;
    neq_ = rf.neq;
    ns_ = rf.nsrows;
    dense_path_ = false;
    for (const RowCone& rc : rf.rows)
      if (rc.kind == ConeKind::psd) dense_path_ = true;

    row_ents_.assign(ns_, {});
    for (const Triplet& t : rf.G) row_ents_[t.row].push_back({t.col, t.val});

    if (!dense_path_) {
      nn_ = nx_ + neq_ + ns_;
      pattern_.clear();
      off_static_.clear();
      for (const Triplet& t : rf.Aeq) {
        pattern_.push_back({t.col, nx_ + t.row});
        off_static_.push_back(t.val);
      }
      for (const Triplet& t : rf.G) {
        pattern_.push_back({t.col, nx_ + neq_ + t.row});
        off_static_.push_back(t.val);
      }
      soc_slot_base_.assign(rf.rows.size(), -1);
      for (std::size_t ci = 0; ci < rf.rows.size(); ++ci) {
        const RowCone& rc = rf.rows[ci];
        if (rc.kind != ConeKind::soc || rc.dim < 2) continue;
        soc_slot_base_[ci] = static_cast<int>(pattern_.size());
        const int base = nx_ + neq_ + rc.offset;
        for (int a = 0; a < rc.dim; ++a)
          for (int b = a + 1; b < rc.dim; ++b) {
            pattern_.push_back({base + a, base + b});
            off_static_.push_back(0.0);
          }
      }
      node_.analyze(nn_, pattern_, /*degree_cap=*/24);
      sign_.assign(nn_, -1);
      for (int j = 0; j < nx_; ++j) sign_[j] = 1;
      diag_.assign(nn_, 0.0);
      off_cur_ = off_static_;
    } else {
      nm_ = nx_ + neq_;
      msign_.assign(nm_, 1);
      for (int k = nx_; k < nm_; ++k) msign_[k] = -1;
      folds_.assign(rf.rows.size(), {});
      for (std::size_t ci = 0; ci < rf.rows.size(); ++ci) {
        const RowCone& rc = rf.rows[ci];
        if (rc.kind != ConeKind::psd) continue;
        PsdFold& f = folds_[ci];
        std::vector<int> cols;
        for (int r = 0; r < rc.dim; ++r)
          for (const auto& e : row_ents_[rc.offset + r]) cols.push_back(e.col);
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        f.sup = cols;
        std::vector<int> pos(nx_, -1);
        for (std::size_t i = 0; i < cols.size(); ++i) pos[cols[i]] = static_cast<int>(i);
        std::vector<std::vector<std::pair<int, double>>> per(cols.size());
        for (int r = 0; r < rc.dim; ++r)
          for (const auto& e : row_ents_[rc.offset + r]) per[pos[e.col]].push_back({r, e.val});
        f.colptr.assign(cols.size() + 1, 0);
        for (std::size_t i = 0; i < cols.size(); ++i)
          f.colptr[i + 1] = f.colptr[i] + static_cast<int>(per[i].size());
        f.ent_local.resize(f.colptr.back());
        f.ent_val.resize(f.colptr.back());
        for (std::size_t i = 0; i < cols.size(); ++i)
          for (std::size_t k = 0; k < per[i].size(); ++k) {
            f.ent_local[f.colptr[i] + k] = per[i][k].first;
            f.ent_val[f.colptr[i] + k] = per[i][k].second;
          }
        f.B.assign(cols.size() * static_cast<std::size_t>(rc.dim), 0.0);
        f.Csub.assign(cols.size() * cols.size(), 0.0);
      }
      mwork_.assign(static_cast<std::size_t>(nm_) * nm_, 0.0);
    }
  }

  void factor(const std::vector<Scale>& sc, double delta = kDelta) {
    if (!dense_path_)
      factor_nodes(sc, delta);
    else
      factor_dense(sc, delta);
  }

  // One unrefined solve of the 3-block system.
  void solve_once(const std::vector<Scale>& sc, const std::vector<double>& bx,
                  const std::vector<double>& by, const std::vector<double>& bz,
                  std::vector<double>& dx, std::vector<double>& dy,
                  std::vector<double>& dz) const {
    if (!dense_path_) {
      std::vector<double> rhs(nn_);
      std::copy(bx.begin(), bx.end(), rhs.begin());
      std::copy(by.begin(), by.end(), rhs.begin() + nx_);
      std::copy(bz.begin(), bz.end(), rhs.begin() + nx_ + neq_);
      node_.solve(rhs);
      dx.assign(rhs.begin(), rhs.begin() + nx_);
      dy.assign(rhs.begin() + nx_, rhs.begin() + nx_ + neq_);
      dz.assign(rhs.begin() + nx_ + neq_, rhs.end());
      return;
    }
    std::vector<double> rhs(nm_);
    std::copy(bx.begin(), bx.end(), rhs.begin());
    std::copy(by.begin(), by.end(), rhs.begin() + nx_);
    std::vector<double> t, tz;
    for (const Scale& s : sc) {
      t.assign(s.dim, 0.0);
      apply_Wsq_inv(s, bz.data() + s.off, t.data());
      for (int r = 0; r < s.dim; ++r)
        for (const auto& e : row_ents_[s.off + r]) rhs[e.col] += e.val * t[r];
    }
    dense_.solve(rhs.data());
    dx.assign(rhs.begin(), rhs.begin() + nx_);
    dy.assign(rhs.begin() + nx_, rhs.end());
    dz.assign(ns_, 0.0);
    for (const Scale& s : sc) {
      t.assign(s.dim, 0.0);
      for (int r = 0; r < s.dim; ++r) {
        double acc = -bz[s.off + r];
        for (const auto& e : row_ents_[s.off + r]) acc += e.val * dx[e.col];
        t[r] = acc;
      }
      tz.assign(s.dim, 0.0);
      apply_Wsq_inv(s, t.data(), tz.data());
      std::copy(tz.begin(), tz.end(), dz.begin() + s.off);
    }
  }

  // Solve with iterative refinement against the unregularized system.
  // Returns the achieved residual norm relative to the rhs scale; the caller
  // can use it to judge whether the direction is trustworthy.
  double solve(const std::vector<Scale>& sc, const std::vector<double>& bx,
               const std::vector<double>& by, const std::vector<double>& bz,
               std::vector<double>& dx, std::vector<double>& dy, std::vector<double>& dz) const {
    solve_once(sc, bx, by, bz, dx, dy, dz);
    const double bscale =
        1.0 + std::max(inf_norm(bx), std::max(inf_norm(by), inf_norm(bz)));
    std::vector<double> r1(nx_), r2(neq_), r3(ns_), t1(nx_), t3(ns_);
    std::vector<double> e1, e2, e3;
    std::vector<double> gx, gy, gz;
    double best = kInf;
    for (int round = 0; round <= kRefineRounds; ++round) {
      residual(sc, bx, by, bz, dx, dy, dz, r1, r2, r3, t1, t3);
      const double rn = std::max(inf_norm(r1), std::max(inf_norm(r2), inf_norm(r3)));
      if (!(rn < best)) {
        // The last correction made things worse; fall back to the best candidate.
        dx = gx;
        dy = gy;
        dz = gz;
        break;
      }
      best = rn;
      if (rn <= 1e-11 * bscale || round == kRefineRounds) break;
      gx = dx;
      gy = dy;
      gz = dz;
      solve_once(sc, r1, r2, r3, e1, e2, e3);
      bool ok = all_finite(e1) && all_finite(e2) && all_finite(e3);
      if (!ok) break;
      for (int i = 0; i < nx_; ++i) dx[i] += e1[i];
      for (int i = 0; i < neq_; ++i) dy[i] += e2[i];
      for (int i = 0; i < ns_; ++i) dz[i] += e3[i];
    }
    return best / bscale;
  }

 private:
  struct RowEnt {
    int col;
    double val;
  };
  struct PsdFold {
    std::vector<int> sup;
    std::vector<int> colptr;
    std::vector<int> ent_local;
    std::vector<double> ent_val;
    std::vector<double> B;
    std::vector<double> Csub;
  };

  void factor_nodes(const std::vector<Scale>& sc, double delta) {
    std::fill(diag_.begin(), diag_.begin() + nx_, delta);
    std::fill(diag_.begin() + nx_, diag_.begin() + nx_ + neq_, -delta);
    std::copy(off_static_.begin(), off_static_.end(), off_cur_.begin());
    for (std::size_t ci = 0; ci < sc.size(); ++ci) {
      const Scale& s = sc[ci];
      const int base = nx_ + neq_ + s.off;
      if (s.kind == ConeKind::nonneg) {
        for (int i = 0; i < s.dim; ++i) diag_[base + i] = -s.w[i] * s.w[i] - delta;
      } else {  // soc
        const double e2 = s.eta * s.eta;
        for (int a = 0; a < s.dim; ++a) {
          const double jaa = (a == 0) ? 1.0 : -1.0;
          diag_[base + a] = -e2 * (2.0 * s.wbar[a] * s.wbar[a] - jaa) - delta;
        }
        int slot = soc_slot_base_[ci];
        if (slot >= 0)
          for (int a = 0; a < s.dim; ++a)
            for (int b = a + 1; b < s.dim; ++b)
              off_cur_[slot++] = -e2 * 2.0 * s.wbar[a] * s.wbar[b];
      }
    }
    node_.factor(diag_, off_cur_, sign_, kPivReg);
  }

  void factor_dense(const std::vector<Scale>& sc, double delta) {
    // DenseLDL::factor moves the matrix out, so rebuild the buffer each call.
    std::vector<double>& M = mwork_;
    M.assign(static_cast<std::size_t>(nm_) * nm_, 0.0);
    for (int j = 0; j < nx_; ++j) M[j + std::size_t(j) * nm_] = delta;
    for (int k = nx_; k < nm_; ++k) M[k + std::size_t(k) * nm_] = -delta;
    for (const Triplet& t : rf_->Aeq) {
      M[(nx_ + t.row) + std::size_t(t.col) * nm_] += t.val;
      M[t.col + std::size_t(nx_ + t.row) * nm_] += t.val;
    }
    std::vector<double> tcol, ecol;
    for (std::size_t ci = 0; ci < sc.size(); ++ci) {
      const Scale& s = sc[ci];
      if (s.kind == ConeKind::nonneg) {
        for (int r = 0; r < s.dim; ++r) {
          const double w2i = 1.0 / (s.w[r] * s.w[r]);
          const auto& ents = row_ents_[s.off + r];
          for (const auto& a : ents)
            for (const auto& b : ents)
              M[a.col + std::size_t(b.col) * nm_] += a.val * b.val * w2i;
        }
      } else if (s.kind == ConeKind::soc) {
        std::vector<int> cols;
        for (int r = 0; r < s.dim; ++r)
          for (const auto& e : row_ents_[s.off + r]) cols.push_back(e.col);
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        const int nl = static_cast<int>(cols.size());
        std::vector<int> pos(nx_, -1);
        for (int i = 0; i < nl; ++i) pos[cols[i]] = i;
        std::vector<double> D(std::size_t(s.dim) * nl, 0.0), E(std::size_t(s.dim) * nl);
        for (int r = 0; r < s.dim; ++r)
          for (const auto& e : row_ents_[s.off + r]) D[std::size_t(pos[e.col]) * s.dim + r] = e.val;
        for (int i = 0; i < nl; ++i)
          apply_Wsq_inv(s, D.data() + std::size_t(i) * s.dim, E.data() + std::size_t(i) * s.dim);
        for (int i = 0; i < nl; ++i)
          for (int j = 0; j < nl; ++j)
            M[cols[i] + std::size_t(cols[j]) * nm_] +=
                kern::dot(D.data() + std::size_t(i) * s.dim, E.data() + std::size_t(j) * s.dim,
                          s.dim);
      } else {  // psd
        PsdFold& f = folds_[ci];
        const int nl = static_cast<int>(f.sup.size());
        if (nl == 0) continue;
        const int q = s.dim;
        std::fill(f.B.begin(), f.B.end(), 0.0);
        tcol.assign(q, 0.0);
        for (int i = 0; i < nl; ++i) {
          std::fill(tcol.begin(), tcol.end(), 0.0);
          for (int k = f.colptr[i]; k < f.colptr[i + 1]; ++k) tcol[f.ent_local[k]] = f.ent_val[k];
          scale_s(s, tcol.data(), f.B.data() + std::size_t(i) * q);
        }
        std::fill(f.Csub.begin(), f.Csub.end(), 0.0);
        kern::gemm_nt_acc(nl, nl, q, f.B.data(), f.B.data(), f.Csub.data(), nl);
        for (int j = 0; j < nl; ++j)
          for (int i = 0; i < nl; ++i)
            M[f.sup[i] + std::size_t(f.sup[j]) * nm_] += f.Csub[i + std::size_t(j) * nl];
      }
    }
    dense_.factor(nm_, M, msign_, kPivReg);
  }

  // r = b - K d against the unregularized K.
  void residual(const std::vector<Scale>& sc, const std::vector<double>& bx,
                const std::vector<double>& by, const std::vector<double>& bz,
                const std::vector<double>& dx, const std::vector<double>& dy,
                const std::vector<double>& dz, std::vector<double>& r1, std::vector<double>& r2,
                std::vector<double>& r3, std::vector<double>& t1, std::vector<double>& t3) const {
    mult_at(*rf_, dy, r1);
    mult_gt(*rf_, dz, t1);
    for (int i = 0; i < nx_; ++i) r1[i] = bx[i] - r1[i] - t1[i];
    mult_a(*rf_, dx, r2);
    for (int i = 0; i < neq_; ++i) r2[i] = by[i] - r2[i];
    mult_g(*rf_, dx, r3);
    t3.assign(ns_, 0.0);
    for (const Scale& s : sc) apply_Wsq(s, dz.data() + s.off, t3.data() + s.off);
    for (int i = 0; i < ns_; ++i) r3[i] = bz[i] - r3[i] + t3[i];
  }

  const ReducedForm* rf_ = nullptr;
  int nx_ = 0, neq_ = 0, ns_ = 0;
  bool dense_path_ = false;

  // node path
  int nn_ = 0;
  la::NodeLDL node_;
  std::vector<std::pair<int, int>> pattern_;
  std::vector<double> off_static_, off_cur_, diag_;
  std::vector<std::int8_t> sign_;
  std::vector<int> soc_slot_base_;

  // dense path
  int nm_ = 0;
  la::DenseLDL dense_;
  std::vector<double> mwork_;
  std::vector<std::int8_t> msign_;
  std::vector<PsdFold> folds_;

  std::vector<std::vector<RowEnt>> row_ents_;
};

// ---------------------------------------------------------------------------

struct Iterate {
  std::vector<double> x, y, z, s;
  double tau = 1.0, kappa = 1.0;
};

struct HsdOutcome {
  SolveStatus status = SolveStatus::numerical;
  Iterate it;
  double pcost = 0.0, dcost = 0.0;
  double relgap = 0.0, pres = 0.0, dres = 0.0;
  int iters = 0;
  std::string note;
};

// Shifts v into the interior of the row cones: v + (1 + alpha) e when the
// worst violation alpha is nonnegative.
void bring_to_cone(const std::vector<Scale>& sc, std::vector<double>& v) {
  double alpha = -kInf;
  for (const Scale& s : sc)
    alpha = std::max(alpha, cone_violation(s.kind, s.size, v.data() + s.off, s.dim));
  // A margin-zero start breaks the first scaling, so shift unless the point
  // is interior by at least one unit; the shift lands it at margin exactly 1.
  if (alpha <= -1.0) return;
  std::vector<double> e;
  for (const Scale& s : sc) {
    e.assign(s.dim, 0.0);
    unit_e(s, e.data());
    kern::axpy(1.0 + alpha, e.data(), v.data() + s.off, s.dim);
  }
}

HsdOutcome run_hsd(const ReducedForm& rf, const SolverOptions& opts) {
  const int nx = rf.nx, neq = rf.neq, ns = rf.nsrows;
  HsdOutcome out;
  Iterate& it = out.it;
  it.x.assign(nx, 0.0);
  it.y.assign(neq, 0.0);
  it.z.assign(ns, 0.0);
  it.s.assign(ns, 0.0);

  std::vector<Scale> sc = make_scales(rf);
  double nu = 0.0;
  for (const Scale& s : sc)
    nu += (s.kind == ConeKind::nonneg) ? s.dim : (s.kind == ConeKind::soc ? 1 : s.size);

  Kkt kkt;
  kkt.analyze(rf);

  const std::vector<double>& b = rf.beq;
  const std::vector<double>& h = rf.h;
  const std::vector<double>& c = rf.c;
  const double c_scale = std::max(1.0, inf_norm(c));
  const double bh_scale = std::max(1.0, std::max(inf_norm(b), inf_norm(h)));
  double a_scale = 1.0;
  for (const Triplet& t : rf.Aeq) a_scale = std::max(a_scale, std::abs(t.val));
  for (const Triplet& t : rf.G) a_scale = std::max(a_scale, std::abs(t.val));

  std::vector<double> negc(nx);
  for (int i = 0; i < nx; ++i) negc[i] = -c[i];

  // Unit initialization: solve with identity scaling for a primal candidate
  // (rhs (0,b,h)) and a dual candidate (rhs (-c,0,0)), then shift slacks and
  // cone duals into the interior.
  kkt.factor(sc);
  {
    std::vector<double> zx(nx, 0.0), zy(neq, 0.0);
    std::vector<double> px, py, pz;
    kkt.solve(sc, zx, b, h, px, py, pz);
    std::vector<double> dxv, dyv, dzv, zz(ns, 0.0);
    kkt.solve(sc, negc, zy, zz, dxv, dyv, dzv);
    if (!all_finite(px) || !all_finite(pz) || !all_finite(dxv) || !all_finite(dzv)) {
      out.note = "initialization produced non-finite values";
      return out;
    }
    it.x = px;
    it.y = dyv;
    for (int i = 0; i < ns; ++i) it.s[i] = -pz[i];
    it.z = dzv;
    bring_to_cone(sc, it.s);
    bring_to_cone(sc, it.z);
  }
  it.tau = 1.0;
  it.kappa = 1.0;

  std::vector<double> rx(nx), ry(neq), rz(ns), t1(nx), t2(ns);
  std::vector<double> x1, y1, z1, x2, y2, z2;
  std::vector<double> dzt(ns), dst(ns), ds(ns), dz_a(ns), ds_a(ns), dzt_a(ns), dst_a(ns);
  std::vector<double> gv(ns), tc(ns), bz(ns), evec(ns);
  std::vector<double> snew(ns), znew(ns);

  Iterate best = it;
  double best_score = kInf;
  double best_met[5] = {0.0, 0.0, kInf, kInf, kInf};  // pcost dcost relgap pres dres
  double reg_delta = kDelta;
  out.status = SolveStatus::max_iter;

  for (int iter = 0;; ++iter) {
    // residuals of the self-dual system
    mult_at(rf, it.y, rx);
    mult_gt(rf, it.z, t1);
    for (int i = 0; i < nx; ++i) rx[i] = -rx[i] - t1[i] - c[i] * it.tau;
    mult_a(rf, it.x, ry);
    for (int i = 0; i < neq; ++i) ry[i] -= b[i] * it.tau;
    mult_g(rf, it.x, rz);
    for (int i = 0; i < ns; ++i) rz[i] += it.s[i] - h[i] * it.tau;
    const double cx = kern::dot(c.data(), it.x.data(), nx);
    const double by = kern::dot(b.data(), it.y.data(), neq);
    const double hz = kern::dot(h.data(), it.z.data(), ns);
    const double rt = cx + by + hz + it.kappa;

    const double szdot = kern::dot(it.s.data(), it.z.data(), ns);
    const double mu = (szdot + it.tau * it.kappa) / (nu + 1.0);

    out.pcost = cx / it.tau + rf.c0;
    out.dcost = (-by - hz) / it.tau + rf.c0;
    out.relgap = (szdot / (it.tau * it.tau)) / std::max(1.0, std::abs(out.pcost));
    const double pdgap = std::abs(out.pcost - out.dcost) / std::max(1.0, std::abs(out.pcost));
    out.pres = std::max(inf_norm(ry), inf_norm(rz)) / (it.tau * bh_scale);
    out.dres = inf_norm(rx) / (it.tau * c_scale);
    out.iters = iter;

    if (opts.trace)
      std::fprintf(stderr,
                   "it %3d  pcost % .6e  gap %.2e  pres %.2e  dres %.2e  "
                   "mu %.2e  tau %.2e  kappa %.2e\n",
                   iter, out.pcost, out.relgap, out.pres, out.dres, mu, it.tau, it.kappa);

    const double score = std::max({out.pres, out.dres, out.relgap});
    if (score < best_score) {
      best_score = score;
      best = it;
      best_met[0] = out.pcost;
      best_met[1] = out.dcost;
      best_met[2] = out.relgap;
      best_met[3] = out.pres;
      best_met[4] = out.dres;
    }

    if (out.pres <= opts.feas_tol && out.dres <= opts.feas_tol && out.relgap <= opts.gap_tol &&
        pdgap <= opts.gap_tol) {
      out.status = SolveStatus::optimal;
      break;
    }
    // A large regression after near-convergence means the last step was
    // numerically corrupted; the best iterate is the answer.
    if (best_score < 1e-4 && score > 1e4 * best_score) {
      out.status = SolveStatus::numerical;
      out.note = "iterate regressed after near-convergence";
      break;
    }
    // Farkas certificates: (y, z) with b'y + h'z < 0 proves primal
    // infeasibility, a cone ray x with c'x < 0 proves dual infeasibility.
    const double byhz = by + hz;
    if (byhz < 0.0) {
      mult_at(rf, it.y, t1);
      mult_gt(rf, it.z, rx);  // reuse
      double resn = 0.0;
      for (int i = 0; i < nx; ++i) resn = std::max(resn, std::abs(t1[i] + rx[i]));
      if (resn / (-byhz) <= opts.feas_tol * a_scale) {
        out.status = SolveStatus::primal_infeasible;
        out.note = "primal infeasibility certificate found";
        break;
      }
    }
    if (cx < 0.0) {
      mult_a(rf, it.x, ry);
      mult_g(rf, it.x, rz);
      for (int i = 0; i < ns; ++i) rz[i] += it.s[i];
      const double resn = std::max(inf_norm(ry), inf_norm(rz));
      if (resn / (-cx) <= opts.feas_tol * a_scale) {
        out.status = SolveStatus::dual_infeasible;
        out.note = "dual infeasibility certificate found";
        break;
      }
    }
    if (iter >= opts.max_iter) {
      out.status = SolveStatus::max_iter;
      out.note = "iteration limit reached";
      break;
    }
    // recompute residuals clobbered by the certificate checks
    mult_at(rf, it.y, rx);
    mult_gt(rf, it.z, t1);
    for (int i = 0; i < nx; ++i) rx[i] = -rx[i] - t1[i] - c[i] * it.tau;
    mult_a(rf, it.x, ry);
    for (int i = 0; i < neq; ++i) ry[i] -= b[i] * it.tau;
    mult_g(rf, it.x, rz);
    for (int i = 0; i < ns; ++i) rz[i] += it.s[i] - h[i] * it.tau;

    bool ok = true;
    for (Scale& s : sc) {
      const bool good = compute_scaling(s, it.s.data() + s.off, it.z.data() + s.off);
      if (!good && opts.trace) {
        std::fprintf(stderr, "      scaling failed: kind %d off %d dim %d\n",
                     static_cast<int>(s.kind), s.off, s.dim);
        for (int i = 0; i < s.dim; ++i)
          std::fprintf(stderr, "        s %.17g  z %.17g\n", it.s[s.off + i], it.z[s.off + i]);
      }
      ok = ok && good;
    }
    if (!ok) {
      out.status = SolveStatus::numerical;
      out.note = "scaling breakdown: iterate left the cone interior";
      break;
    }
    kkt.factor(sc, reg_delta);

    const double q1 = kkt.solve(sc, negc, b, h, x1, y1, z1);
    const double den = kern::dot(c.data(), x1.data(), nx) + kern::dot(b.data(), y1.data(), neq) +
                       kern::dot(h.data(), z1.data(), ns) - it.kappa / it.tau;
    if (q1 > kQualTol || !std::isfinite(den) || den == 0.0) {
      if (reg_delta < kDeltaMax) {
        reg_delta *= 1e3;  // retry the iteration with a stronger proximal term
        continue;
      }
      out.status = SolveStatus::numerical;
      out.note = "degenerate step equation";
      break;
    }

    // affine predictor
    for (int i = 0; i < ns; ++i) bz[i] = -rz[i] + it.s[i];
    std::vector<double> nry(neq);
    for (int i = 0; i < neq; ++i) nry[i] = -ry[i];
    const double q2 = kkt.solve(sc, rx, nry, bz, x2, y2, z2);
    if (q2 > kQualTol) {
      if (reg_delta < kDeltaMax) {
        reg_delta *= 1e3;
        continue;
      }
      out.status = SolveStatus::numerical;
      out.note = "predictor solve lost accuracy";
      break;
    }
    const double dtau_a =
        (it.kappa - rt - kern::dot(c.data(), x2.data(), nx) -
         kern::dot(b.data(), y2.data(), neq) - kern::dot(h.data(), z2.data(), ns)) /
        den;
    for (int i = 0; i < ns; ++i) dz_a[i] = z2[i] + dtau_a * z1[i];
    for (const Scale& s : sc) scale_z(s, dz_a.data() + s.off, dzt_a.data() + s.off);
    for (const Scale& s : sc)
      for (int i = s.off; i < s.off + s.dim; ++i) dst_a[i] = -s.lam[i - s.off] - dzt_a[i];
    const double dkappa_a = -it.kappa - (it.kappa / it.tau) * dtau_a;

    double ta = kInf;
    for (const Scale& s : sc) {
      ta = std::min(ta, max_step(s, dst_a.data() + s.off));
      ta = std::min(ta, max_step(s, dzt_a.data() + s.off));
    }
    if (dtau_a < 0.0) ta = std::min(ta, -it.tau / dtau_a);
    if (dkappa_a < 0.0) ta = std::min(ta, -it.kappa / dkappa_a);
    const double alpha_a = std::min(1.0, ta);
    const double sigma = std::pow(1.0 - alpha_a, 3);
    const double oms = 1.0 - sigma;

    // combined corrector
    for (const Scale& s : sc) {
      const int o = s.off;
      jprod(s, dst_a.data() + o, dzt_a.data() + o, tc.data() + o);
      std::vector<double> lsq(s.dim), ev(s.dim);
      jprod(s, s.lam.data(), s.lam.data(), lsq.data());
      unit_e(s, ev.data());
      for (int i = 0; i < s.dim; ++i)
        tc[o + i] = sigma * mu * ev[i] - lsq[i] - tc[o + i];
      jdiv_lambda(s, tc.data() + o, gv.data() + o);
    }
    for (const Scale& s : sc) apply_WT(s, gv.data() + s.off, t2.data() + s.off);
    for (int i = 0; i < ns; ++i) bz[i] = -oms * rz[i] - t2[i];
    std::vector<double> srx(nx);
    for (int i = 0; i < nx; ++i) srx[i] = oms * rx[i];
    for (int i = 0; i < neq; ++i) nry[i] = -oms * ry[i];
    const double q3 = kkt.solve(sc, srx, nry, bz, x2, y2, z2);
    if (q3 > kQualTol) {
      if (reg_delta < kDeltaMax) {
        reg_delta *= 1e3;
        continue;
      }
      out.status = SolveStatus::numerical;
      out.note = "corrector solve lost accuracy";
      break;
    }
    const double n6 = (sigma * mu - it.tau * it.kappa - dtau_a * dkappa_a) / it.tau;
    const double dtau =
        (-oms * rt - n6 - kern::dot(c.data(), x2.data(), nx) -
         kern::dot(b.data(), y2.data(), neq) - kern::dot(h.data(), z2.data(), ns)) /
        den;
    for (int i = 0; i < nx; ++i) x2[i] += dtau * x1[i];
    for (int i = 0; i < neq; ++i) y2[i] += dtau * y1[i];
    for (int i = 0; i < ns; ++i) z2[i] += dtau * z1[i];
    for (const Scale& s : sc) scale_z(s, z2.data() + s.off, dzt.data() + s.off);
    for (int i = 0; i < ns; ++i) dst[i] = gv[i] - dzt[i];
    for (const Scale& s : sc) apply_WT(s, dst.data() + s.off, ds.data() + s.off);
    const double dkappa = n6 - (it.kappa / it.tau) * dtau;

    if (!all_finite(x2) || !all_finite(z2) || !all_finite(ds) || !std::isfinite(dtau)) {
      out.status = SolveStatus::numerical;
      out.note = "non-finite search direction";
      break;
    }

    double tmax = kInf;
    for (const Scale& s : sc) {
      tmax = std::min(tmax, max_step(s, dst.data() + s.off));
      tmax = std::min(tmax, max_step(s, dzt.data() + s.off));
    }
    if (dtau < 0.0) tmax = std::min(tmax, -it.tau / dtau);
    if (dkappa < 0.0) tmax = std::min(tmax, -it.kappa / dkappa);
    double alpha = std::min(1.0, kStepBack * tmax);

    // Guard: the updated point must stay strictly interior.
    bool stepped = false;
    for (int tries = 0; tries < 60; ++tries) {
      bool inside = it.tau + alpha * dtau > 0.0 && it.kappa + alpha * dkappa > 0.0;
      if (inside) {
        for (int i = 0; i < ns; ++i) snew[i] = it.s[i] + alpha * ds[i];
        for (int i = 0; i < ns; ++i) znew[i] = it.z[i] + alpha * z2[i];
        for (const Scale& s : sc) {
          if (cone_violation(s.kind, s.size, snew.data() + s.off, s.dim) >= 0.0 ||
              cone_violation(s.kind, s.size, znew.data() + s.off, s.dim) >= 0.0) {
            inside = false;
            break;
          }
        }
      }
      if (inside) {
        stepped = true;
        break;
      }
      alpha *= 0.8;
      if (alpha < 1e-13) break;
    }
    if (opts.trace)
      std::fprintf(stderr, "      q1 %.2e  q2 %.2e  q3 %.2e  sigma %.2e  alpha %.4f\n", q1, q2,
                   q3, sigma, alpha);

    if (!stepped || alpha < 1e-11) {
      out.status = SolveStatus::numerical;
      out.note = "step size collapsed";
      break;
    }

    for (int i = 0; i < nx; ++i) it.x[i] += alpha * x2[i];
    for (int i = 0; i < neq; ++i) it.y[i] += alpha * y2[i];
    for (int i = 0; i < ns; ++i) it.z[i] += alpha * z2[i];
    for (int i = 0; i < ns; ++i) it.s[i] += alpha * ds[i];
    it.tau += alpha * dtau;
    it.kappa += alpha * dkappa;
  }

  if (out.status != SolveStatus::optimal && out.status != SolveStatus::primal_infeasible &&
      out.status != SolveStatus::dual_infeasible) {
    // Return the best iterate, with its metrics, rather than the point the
    // breakdown was detected at.
    it = best;
    out.pcost = best_met[0];
    out.dcost = best_met[1];
    out.relgap = best_met[2];
    out.pres = best_met[3];
    out.dres = best_met[4];
    const double pdgap = std::abs(out.pcost - out.dcost) / std::max(1.0, std::abs(out.pcost));
    // Degenerate optimal faces can exhaust double precision just above the
    // target tolerance; accept the point when it is close enough to be useful.
    if (out.status == SolveStatus::numerical && out.pres <= 1e3 * opts.feas_tol &&
        out.dres <= 1e3 * opts.feas_tol && out.relgap <= 1e3 * opts.gap_tol &&
        pdgap <= 1e3 * opts.gap_tol) {
      out.status = SolveStatus::optimal;
      out.note = "reduced-accuracy optimum: " + out.note;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rotated second-order-cone form: every rsoc row pair (p, q) is replaced by
// ((p+q)/sqrt2, (p-q)/sqrt2) so the interior-point core only meets nonneg,
// soc, and psd cones. The map is orthogonal and involutive.

std::vector<int> rotate_rsoc_rows(ReducedForm& rf) {
  std::vector<int> offsets;
  bool any = false;
  for (RowCone& rc : rf.rows)
    if (rc.kind == ConeKind::rsoc) any = true;
  if (!any) return offsets;
  const double irt2 = 1.0 / std::sqrt(2.0);
  // per-row entry maps for the affected rows only
  std::vector<std::vector<Triplet>> per_row(rf.nsrows);
  for (const Triplet& t : rf.G) per_row[t.row].push_back(t);
  for (RowCone& rc : rf.rows) {
    if (rc.kind != ConeKind::rsoc) continue;
    offsets.push_back(rc.offset);
    const int r0 = rc.offset, r1 = rc.offset + 1;
    std::vector<double> dense0(rf.nx, 0.0), dense1(rf.nx, 0.0);
    for (const Triplet& t : per_row[r0]) dense0[t.col] = t.val;
    for (const Triplet& t : per_row[r1]) dense1[t.col] = t.val;
    std::vector<Triplet> n0, n1;
    for (int c = 0; c < rf.nx; ++c) {
      const double a = (dense0[c] + dense1[c]) * irt2;
      const double bb = (dense0[c] - dense1[c]) * irt2;
      if (a != 0.0) n0.push_back({r0, c, a});
      if (bb != 0.0) n1.push_back({r1, c, bb});
    }
    per_row[r0] = std::move(n0);
    per_row[r1] = std::move(n1);
    const double h0 = rf.h[r0], h1 = rf.h[r1];
    rf.h[r0] = (h0 + h1) * irt2;
    rf.h[r1] = (h0 - h1) * irt2;
    rc.kind = ConeKind::soc;
  }
  rf.G.clear();
  for (const auto& rowv : per_row)
    for (const Triplet& t : rowv) rf.G.push_back(t);
  return offsets;
}

void unrotate_pairs(const std::vector<int>& offsets, std::vector<double>& v) {
  const double irt2 = 1.0 / std::sqrt(2.0);
  for (int off : offsets) {
    const double a = v[off], b = v[off + 1];
    v[off] = (a + b) * irt2;
    v[off + 1] = (a - b) * irt2;
  }
}

// Maps reduced-space duals back to the original rows and columns. With
// homogeneous = true the objective coefficients are dropped (Farkas
// certificates are homogeneous in c).
void map_duals(const co::ConicProgram& prog, const ReducedForm& rf,
               const std::vector<double>& yeq, const std::vector<double>& z, bool homogeneous,
               std::vector<double>& y, std::vector<double>& v) {
  y.assign(prog.nrows, 0.0);
  v.assign(prog.ncols, 0.0);
  for (int k = 0; k < rf.neq; ++k) y[rf.eq_orig_row[k]] = -yeq[k];
  for (int r = 0; r < rf.nsrows; ++r) {
    const int col = rf.srow_col[r];
    v[col] = z[r];
    const int orow = rf.srow_orig_row[r];
    if (orow >= 0) {
      const double cj = homogeneous ? 0.0 : prog.c[col];
      y[orow] = (cj - z[r]) / rf.srow_coef[r];
    }
  }
}

}  // namespace

void SolverOptions::validate() const {
  if (!(gap_tol > 0.0) || !(feas_tol > 0.0) || !std::isfinite(gap_tol) || !std::isfinite(feas_tol))
    throw ValidationError("solver options: tolerances must be positive and finite");
  if (max_iter < 1) throw ValidationError("solver options: max_iter must be at least 1");
}

co::SolveResult solve(const co::ConicProgram& prog, const SolverOptions& opts) {
  opts.validate();
  co::validate_program(prog);
  ReducedForm rf = co::reduce(prog);
  ReducedForm rfq = rf;
  const std::vector<int> rot = rotate_rsoc_rows(rfq);

  HsdOutcome hsd = run_hsd(rfq, opts);

  SolveResult res;
  res.status = hsd.status;
  res.iters = hsd.iters;
  res.note = hsd.note;
  res.pres = hsd.pres;
  res.dres = hsd.dres;

  Iterate& it = hsd.it;
  unrotate_pairs(rot, it.s);
  unrotate_pairs(rot, it.z);

  if (res.status == SolveStatus::primal_infeasible) {
    const double by = kern::dot(rf.beq.data(), it.y.data(), rf.neq);
    const double hz = kern::dot(rf.h.data(), it.z.data(), rf.nsrows);
    const double scale = -(by + hz);
    std::vector<double> ys = it.y, zs = it.z;
    for (double& v : ys) v /= scale;
    for (double& v : zs) v /= scale;
    map_duals(prog, rf, ys, zs, /*homogeneous=*/true, res.y, res.s);
    res.pobj = res.dobj = 0.0;
    res.gap = 0.0;
    return res;
  }
  if (res.status == SolveStatus::dual_infeasible) {
    std::vector<double> xs = it.x, ss = it.s;
    const double scale = -kern::dot(rf.c.data(), it.x.data(), rf.nx);
    for (double& v : xs) v /= scale;
    for (double& v : ss) v /= scale;
    res.x = co::recover_primal(rf, xs, ss);
    res.pobj = res.dobj = 0.0;
    res.gap = 0.0;
    return res;
  }

  // optimal / max_iter / numerical: report the tau-scaled iterate.
  std::vector<double> xs = it.x, ss = it.s, zs = it.z, ys = it.y;
  for (double& v : xs) v /= it.tau;
  for (double& v : ss) v /= it.tau;
  for (double& v : zs) v /= it.tau;
  for (double& v : ys) v /= it.tau;
  res.x = co::recover_primal(rf, xs, ss);
  map_duals(prog, rf, ys, zs, /*homogeneous=*/false, res.y, res.s);
  res.pobj = prog.obj_const;
  for (int j = 0; j < prog.ncols; ++j) res.pobj += prog.c[j] * res.x[j];
  res.dobj = hsd.dcost;
  res.gap = std::abs(res.pobj - res.dobj) / std::max(1.0, std::abs(res.pobj));
  return res;
}

LocationSolution recover_location(const co::SolveResult& res, const rf::VariableMap& vars,
                                  const Instance& inst) {
  LocationSolution ls;
  if (vars.x0 >= 0)
    ls.x.assign(res.x.begin() + vars.x0, res.x.begin() + vars.x0 + vars.dim);
  if (vars.z0 >= 0)
    ls.z.assign(res.x.begin() + vars.z0, res.x.begin() + vars.z0 + vars.n);
  ls.program_value = res.pobj;
  ls.recomputed_value = rf::ordered_value(inst, ls.x);
  ls.discrepancy = std::abs(ls.program_value - ls.recomputed_value);
  return ls;
}

}  // namespace ordmed::so
