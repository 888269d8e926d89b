#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ordmed::pc {

// Symbols of the decomposition: X plays y, T plays z, U plays u; W(i) are the
// auxiliary tower variables, defined exactly once before use.
struct Symbol {
  enum class Tag { X, T, U, ONE, W };
  Tag tag = Tag::X;
  int windex = 0;  // W only, 1-based

  static Symbol X() { return {Tag::X, 0}; }
  static Symbol T() { return {Tag::T, 0}; }
  static Symbol U() { return {Tag::U, 0}; }
  static Symbol One() { return {Tag::ONE, 0}; }
  static Symbol W(int i) { return {Tag::W, i}; }
  bool operator==(const Symbol&) const = default;
  std::string str() const;
};

// lhs^2 <= rhs1 * rhs2. level groups inequalities the way the backward
// expansion consumes them: all of digit i's inequalities carry level i+1.
struct ChainInequality {
  Symbol lhs, rhs1, rhs2;
  int level = 0;
  bool operator==(const ChainInequality&) const = default;
};

struct PowerChain {
  std::int64_t r = 0, s = 0;
  int k = 0;  // 2^{k-1} < r <= 2^k
  std::vector<std::uint8_t> alpha, beta, gamma;  // binary digits of s, r-s, 2^k-r
  enum class CaseTag { case1, case2 };
  CaseTag case_tag = CaseTag::case1;
  struct Block {
    int i_j = 0;    // digit position with sigma = 3
    int i_l = 0;    // closing position with sigma = 0
    int theta = 0;  // W index opening the block
  };
  std::vector<Block> blocks;
  // Number of auxiliary W inequalities (1 for the no-auxiliary base chain).
  // The full chain including the final X^2 <= . inequality is chain.size().
  int m = 0;
  std::vector<ChainInequality> chain;  // ends with lhs = X
  bool generic = false;                // built by the pairing construction
};

// Lemma-2 construction. Falls back to generic_decompose (flagging the result)
// if the digit pattern escapes the two-case classification; the result always
// passes verify_chain.
PowerChain decompose(std::int64_t r, std::int64_t s);

// Independent balanced-pairing construction over the 2^k leaf multiset
// {U x s, T x (r-s), X x (2^k - r)}; used as a cross-check oracle.
PowerChain generic_decompose(std::int64_t r, std::int64_t s);

// Exact symbolic check: expanding the chain backward from the final
// inequality must recover X^{2^k} <= U^s T^{r-s} X^{2^k - r}.
bool verify_chain(const PowerChain& chain);

// One backward-expansion row: X^{2^pw} <= prod syms^exp.
struct ExpansionRow {
  int level = 0;
  int pw = 0;
  std::vector<std::pair<Symbol, unsigned __int128>> exps;  // deterministic order
};
// Full table, last chain level first (empty if the chain is structurally bad).
std::vector<ExpansionRow> expansion_table(const PowerChain& chain);

std::string exponent_str(unsigned __int128 v);

}  // namespace ordmed::pc
