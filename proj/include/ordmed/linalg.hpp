#pragma once

#include <cstdint>
#include <vector>

namespace ordmed::la {

// LDL^T of a symmetric quasi-definite matrix, column-major full storage with
// only the lower triangle significant. sign[i] in {+1, -1} gives the expected
// inertia; pivots are regularized toward sign[i] * reg when they collapse.
class DenseLDL {
 public:
  void factor(int n, std::vector<double>& a, const std::vector<std::int8_t>& sign, double reg);
  void solve(double* x) const;
  int order() const { return n_; }

 private:
  int n_ = 0;
  std::vector<double> l_;  // unit lower, column-major full storage
  std::vector<double> d_;
};

// Cyclic Jacobi for small dense symmetric matrices (row-major input).
// Eigenvalues ascending; evecs column k (row-major, evecs[i*n+k]) pairs with
// evals[k].
void sym_eig(int n, const double* a, double* evals, double* evecs);

// Symmetric quasi-definite factorization over a general node graph:
// low-degree nodes are eliminated sparsely in min-degree order (ties by
// index) with a precomputed update script; the remaining dense core goes
// through DenseLDL. analyze() fixes ordering, fill slots, and the script from
// the pattern alone; factor() is called once per interior-point iteration
// with fresh values in the same pattern order.
class NodeLDL {
 public:
  // pattern: distinct off-diagonal pairs (i, j), i != j, any order; duplicate
  // pairs are rejected. Values passed to factor() align with this pattern.
  void analyze(int nnodes, const std::vector<std::pair<int, int>>& pattern, int degree_cap);

  void factor(const std::vector<double>& diag, const std::vector<double>& offdiag,
              const std::vector<std::int8_t>& sign, double reg);
  void solve(std::vector<double>& rhs) const;

  int core_size() const { return static_cast<int>(core_nodes_.size()); }
  int eliminated() const { return static_cast<int>(elim_.size()); }

 private:
  struct Elim {
    int node = 0;
    std::vector<int> nbr;        // alive neighbors at elimination, ascending
    std::vector<int> nbr_slot;   // edge slot (node, nbr[t])
    std::vector<int> pair_slot;  // slot for (nbr[i], nbr[j]) i<j, row-major order
  };

  int n_ = 0;
  int npattern_ = 0;
  int nslots_ = 0;
  std::vector<Elim> elim_;
  std::vector<int> core_nodes_;              // ascending
  std::vector<int> core_index_;              // node -> core position or -1
  std::vector<std::pair<int, int>> core_edges_;  // (slot, core flat index i + j*ncore), i >= j

  // numeric state
  std::vector<double> lvals_;  // per elim, concatenated l columns
  std::vector<int> loffs_;
  std::vector<double> dvals_;
  DenseLDL core_;
  std::vector<double> core_mat_;

  mutable std::vector<double> work_;
};

}  // namespace ordmed::la
