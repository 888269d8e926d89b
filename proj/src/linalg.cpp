#include "ordmed/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

#include "ordmed/errors.hpp"
#include "ordmed/kernels.hpp"

namespace ordmed::la {

namespace {
constexpr int kPanel = 64;
}

void DenseLDL::factor(int n, std::vector<double>& a, const std::vector<std::int8_t>& sign,
                      double reg) {
  n_ = n;
  l_ = std::move(a);
  d_.assign(n, 0.0);
  const std::size_t ld = n;
  std::vector<double> packL, packW;

  for (int j0 = 0; j0 < n; j0 += kPanel) {
    const int j1 = std::min(j0 + kPanel, n);
    const int bw = j1 - j0;
    // Left-looking inside the panel.
    for (int j = j0; j < j1; ++j) {
      double* colj = l_.data() + std::size_t(j) * ld;
      for (int k = j0; k < j; ++k) {
        const double* colk = l_.data() + std::size_t(k) * ld;
        kern::axpy(-colk[j] * d_[k], colk + j, colj + j, n - j);
      }
      double d = colj[j];
      const double s = sign[j] >= 0 ? 1.0 : -1.0;
      if (s * d < reg) d = s * reg;  // pivot collapsed or crossed: clamp
      d_[j] = d;
      colj[j] = 1.0;
      kern::scal(1.0 / d, colj + j + 1, n - j - 1);
    }
    if (j1 == n) break;
    // Trailing update: A22 -= L21 D L21^T via packed row-major panels.
    const int m = n - j1;
    packL.assign(std::size_t(m) * bw, 0.0);
    packW.assign(std::size_t(m) * bw, 0.0);
    for (int k = 0; k < bw; ++k) {
      const double* colk = l_.data() + std::size_t(j0 + k) * ld + j1;
      const double dk = d_[j0 + k];
      for (int i = 0; i < m; ++i) {
        packL[std::size_t(i) * bw + k] = colk[i];
        packW[std::size_t(i) * bw + k] = colk[i] * dk;
      }
    }
    for (int cb = j1; cb < n; cb += kPanel) {
      const int cw = std::min(kPanel, n - cb);
      kern::gemm_nt_sub(n - cb, cw, bw, packL.data() + std::size_t(cb - j1) * bw,
                        packW.data() + std::size_t(cb - j1) * bw,
                        l_.data() + std::size_t(cb) * ld + cb, n);
    }
  }
}

void DenseLDL::solve(double* x) const {
  const std::size_t ld = n_;
  for (int j = 0; j < n_; ++j)
    kern::axpy(-x[j], l_.data() + std::size_t(j) * ld + j + 1, x + j + 1, n_ - j - 1);
  for (int j = 0; j < n_; ++j) x[j] /= d_[j];
  for (int j = n_ - 2; j >= 0; --j)
    x[j] -= kern::dot(l_.data() + std::size_t(j) * ld + j + 1, x + j + 1, n_ - j - 1);
}

void sym_eig(int n, const double* a, double* evals, double* evecs) {
  std::vector<double> m(a, a + std::size_t(n) * n);
  std::vector<double> v(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[std::size_t(i) * n + i] = 1.0;
  auto at = [&](std::vector<double>& mat, int i, int j) -> double& {
    return mat[std::size_t(i) * n + j];
  };

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        (i == j ? diag : off) += m[std::size_t(i) * n + j] * m[std::size_t(i) * n + j];
    if (off <= 1e-28 * std::max(diag, 1e-300)) break;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(m, p, q);
        if (apq == 0.0) continue;
        const double app = at(m, p, p), aqq = at(m, q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = at(m, k, p), mkq = at(m, k, q);
          at(m, k, p) = c * mkp - s * mkq;
          at(m, k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = at(m, p, k), mqk = at(m, q, k);
          at(m, p, k) = c * mpk - s * mqk;
          at(m, q, k) = s * mpk + c * mqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = at(v, k, p), vkq = at(v, k, q);
          at(v, k, p) = c * vkp - s * vkq;
          at(v, k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = m[std::size_t(i) * n + i];
  std::sort(perm.begin(), perm.end(), [&](int x, int y) {
    return diag[x] != diag[y] ? diag[x] < diag[y] : x < y;
  });
  for (int k = 0; k < n; ++k) {
    evals[k] = diag[perm[k]];
    for (int i = 0; i < n; ++i) evecs[std::size_t(i) * n + k] = v[std::size_t(i) * n + perm[k]];
  }
}

void NodeLDL::analyze(int nnodes, const std::vector<std::pair<int, int>>& pattern,
                      int degree_cap) {
  n_ = nnodes;
  npattern_ = static_cast<int>(pattern.size());
  elim_.clear();
  core_nodes_.clear();
  core_edges_.clear();

  std::vector<std::vector<int>> adj(nnodes);
  std::unordered_map<std::int64_t, int> slot_of;
  slot_of.reserve(pattern.size() * 2);
  auto key = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    return std::int64_t(a) * nnodes + b;
  };
  int nslots = 0;
  for (const auto& [i, j] : pattern) {
    if (i == j || i < 0 || j < 0 || i >= nnodes || j >= nnodes)
      throw ValidationError("node factorization: bad pattern entry");
    if (!slot_of.emplace(key(i, j), nslots).second)
      throw ValidationError("node factorization: duplicate pattern entry");
    ++nslots;
    adj[i].push_back(j);
    adj[j].push_back(i);
  }

  std::vector<char> dead(nnodes, 0);
  std::vector<int> degree(nnodes);
  using QE = std::pair<int, int>;  // (degree, node)
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
  for (int i = 0; i < nnodes; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    degree[i] = static_cast<int>(adj[i].size());
    pq.push({degree[i], i});
  }

  auto alive_neighbors = [&](int p) {
    std::vector<int> out;
    out.reserve(adj[p].size());
    for (int q : adj[p])
      if (!dead[q]) out.push_back(q);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  while (!pq.empty()) {
    auto [deg, p] = pq.top();
    pq.pop();
    if (dead[p] || deg != degree[p]) continue;  // stale entry
    if (deg > degree_cap) break;

    Elim e;
    e.node = p;
    e.nbr = alive_neighbors(p);
    dead[p] = 1;
    const int k = static_cast<int>(e.nbr.size());
    e.nbr_slot.resize(k);
    for (int t = 0; t < k; ++t) e.nbr_slot[t] = slot_of.at(key(p, e.nbr[t]));
    e.pair_slot.reserve(std::size_t(k) * (k - 1) / 2);
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        auto [it, fresh] = slot_of.emplace(key(e.nbr[i], e.nbr[j]), nslots);
        if (fresh) {  // fill edge
          ++nslots;
          adj[e.nbr[i]].push_back(e.nbr[j]);
          adj[e.nbr[j]].push_back(e.nbr[i]);
        }
        e.pair_slot.push_back(it->second);
      }
    for (int q : e.nbr) {
      degree[q] = static_cast<int>(alive_neighbors(q).size());
      pq.push({degree[q], q});
    }
    elim_.push_back(std::move(e));
  }

  core_index_.assign(nnodes, -1);
  for (int i = 0; i < nnodes; ++i)
    if (!dead[i]) {
      core_index_[i] = static_cast<int>(core_nodes_.size());
      core_nodes_.push_back(i);
    }
  const int ncore = static_cast<int>(core_nodes_.size());
  for (const auto& [k, slot] : slot_of) {
    const int a = static_cast<int>(k / nnodes), b = static_cast<int>(k % nnodes);
    if (dead[a] || dead[b]) continue;
    const int ca = core_index_[a], cb = core_index_[b];
    const int i = std::max(ca, cb), j = std::min(ca, cb);
    core_edges_.push_back({slot, i + j * ncore});
  }
  std::sort(core_edges_.begin(), core_edges_.end(),
            [](const auto& x, const auto& y) { return x.second < y.second; });

  nslots_ = nslots;
  loffs_.assign(elim_.size() + 1, 0);
  for (std::size_t t = 0; t < elim_.size(); ++t)
    loffs_[t + 1] = loffs_[t] + static_cast<int>(elim_[t].nbr.size());
  lvals_.assign(loffs_.back(), 0.0);
  dvals_.assign(nnodes, 0.0);
}

void NodeLDL::factor(const std::vector<double>& diag, const std::vector<double>& offdiag,
                     const std::vector<std::int8_t>& sign, double reg) {
  if (static_cast<int>(offdiag.size()) != npattern_)
    throw ValidationError("node factorization: value/pattern length mismatch");
  std::vector<double> dwork(diag);
  std::vector<double> owork(nslots_, 0.0);
  std::copy(offdiag.begin(), offdiag.end(), owork.begin());

  for (std::size_t t = 0; t < elim_.size(); ++t) {
    const Elim& e = elim_[t];
    double d = dwork[e.node];
    const double s = sign[e.node] >= 0 ? 1.0 : -1.0;
    if (s * d < reg) d = s * reg;
    dvals_[e.node] = d;
    const int k = static_cast<int>(e.nbr.size());
    double* l = lvals_.data() + loffs_[t];
    for (int i = 0; i < k; ++i) {
      l[i] = owork[e.nbr_slot[i]] / d;
      dwork[e.nbr[i]] -= l[i] * owork[e.nbr_slot[i]];
    }
    int pp = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j, ++pp)
        owork[e.pair_slot[pp]] -= l[i] * d * l[j];
  }

  const int ncore = static_cast<int>(core_nodes_.size());
  core_mat_.assign(std::size_t(ncore) * ncore, 0.0);
  for (int ci = 0; ci < ncore; ++ci)
    core_mat_[std::size_t(ci) * ncore + ci] = dwork[core_nodes_[ci]];
  for (const auto& [slot, flat] : core_edges_) core_mat_[flat] += owork[slot];
  std::vector<std::int8_t> core_sign(ncore);
  for (int ci = 0; ci < ncore; ++ci) core_sign[ci] = sign[core_nodes_[ci]];
  core_.factor(ncore, core_mat_, core_sign, reg);
}

void NodeLDL::solve(std::vector<double>& rhs) const {
  for (std::size_t t = 0; t < elim_.size(); ++t) {
    const Elim& e = elim_[t];
    const double* l = lvals_.data() + loffs_[t];
    const double xp = rhs[e.node];
    for (std::size_t i = 0; i < e.nbr.size(); ++i) rhs[e.nbr[i]] -= l[i] * xp;
  }
  const int ncore = static_cast<int>(core_nodes_.size());
  work_.resize(ncore);
  for (int ci = 0; ci < ncore; ++ci) work_[ci] = rhs[core_nodes_[ci]];
  core_.solve(work_.data());
  for (int ci = 0; ci < ncore; ++ci) rhs[core_nodes_[ci]] = work_[ci];
  for (std::size_t t = elim_.size(); t-- > 0;) {
    const Elim& e = elim_[t];
    const double* l = lvals_.data() + loffs_[t];
    double acc = rhs[e.node] / dvals_[e.node];
    for (std::size_t i = 0; i < e.nbr.size(); ++i) acc -= l[i] * rhs[e.nbr[i]];
    rhs[e.node] = acc;
  }
}

}  // namespace ordmed::la
