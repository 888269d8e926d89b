#include "ordmed/powercone.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "ordmed/errors.hpp"
#include "ordmed/rational.hpp"

namespace ordmed::pc {

using u128 = unsigned __int128;

std::string Symbol::str() const {
  switch (tag) {
    case Tag::X: return "x";
    case Tag::T: return "t";
    case Tag::U: return "u";
    case Tag::ONE: return "1";
    case Tag::W: return "w" + std::to_string(windex);
  }
  return "?";
}

std::string exponent_str(u128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v > 0) {
    out.push_back(char('0' + int(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

namespace {

void check_pair(std::int64_t r, std::int64_t s) {
  if (r < 2 || s < 1 || s >= r)
    throw ValidationError("power decomposition needs r > s >= 1, r >= 2, got r=" +
                          std::to_string(r) + " s=" + std::to_string(s));
  if (r >= (std::int64_t(1) << 60))
    throw ValidationError("power decomposition caps r below 2^60, got r=" + std::to_string(r));
  if (std::int64_t g = gcd64(r, s); g != 1)
    throw ValidationError("power decomposition needs gcd(r, s) = 1, got gcd(" +
                          std::to_string(r) + ", " + std::to_string(s) + ") = " +
                          std::to_string(g));
}

int ceil_log2(std::int64_t r) {
  int k = 0;
  while ((std::int64_t(1) << k) < r) ++k;
  return k;
}

std::vector<std::uint8_t> bin_digits(std::int64_t v, int k) {
  std::vector<std::uint8_t> d(k, 0);
  for (int i = 0; i < k; ++i) d[i] = std::uint8_t((v >> i) & 1);
  return d;
}

void fill_header(PowerChain& c, std::int64_t r, std::int64_t s) {
  c.r = r;
  c.s = s;
  c.k = ceil_log2(r);
  c.alpha = bin_digits(s, c.k);
  c.beta = bin_digits(r - s, c.k);
  c.gamma = bin_digits((std::int64_t(1) << c.k) - r, c.k);
}

// Symbols present at digit i, in (U, T, X) priority order.
std::vector<Symbol> present(const PowerChain& c, int i) {
  std::vector<Symbol> p;
  if (c.alpha[i]) p.push_back(Symbol::U());
  if (c.beta[i]) p.push_back(Symbol::T());
  if (c.gamma[i]) p.push_back(Symbol::X());
  return p;
}

// Sort key giving the deterministic symbol order U < T < X < 1 < W1 < W2 < ...
int sym_key(const Symbol& s) {
  switch (s.tag) {
    case Symbol::Tag::U: return 0;
    case Symbol::Tag::T: return 1;
    case Symbol::Tag::X: return 2;
    case Symbol::Tag::ONE: return 3;
    case Symbol::Tag::W: return 3 + s.windex;
  }
  return -1;
}

Symbol key_sym(int key) {
  switch (key) {
    case 0: return Symbol::U();
    case 1: return Symbol::T();
    case 2: return Symbol::X();
    case 3: return Symbol::One();
    default: return Symbol::W(key - 3);
  }
}

}  // namespace

PowerChain decompose(std::int64_t r, std::int64_t s) {
  check_pair(r, s);
  PowerChain c;
  fill_header(c, r, s);
  const int k = c.k;

  bool case1 = true;
  for (int i = 1; i <= k - 2; ++i)
    if (c.alpha[i] + c.beta[i] + c.gamma[i] != 1) case1 = false;
  c.case_tag = case1 ? PowerChain::CaseTag::case1 : PowerChain::CaseTag::case2;

  // Stream over digits. The carry holds the live partial products: one symbol
  // outside a block, two inside. For coprime (r, s) the digit sums keep the
  // carry in {1, 2}, so the scan below is total; `bad` is pure defense.
  int w = 0;
  std::vector<Symbol> carry;
  bool bad = false;
  auto emit = [&](Symbol lhs, Symbol a, Symbol b, int level) {
    c.chain.push_back({lhs, a, b, level});
  };
  auto fresh = [&]() { return Symbol::W(++w); };

  for (int i = 0; i < k && !bad; ++i) {
    const std::vector<Symbol> p = present(c, i);
    const int sigma = int(p.size());
    const int level = i + 1;
    if (i == 0) {
      if (sigma != 2) {
        bad = true;
      } else if (k == 1) {
        emit(Symbol::X(), p[0], p[1], level);
      } else {
        Symbol nw = fresh();
        emit(nw, p[0], p[1], level);
        carry = {nw};
      }
    } else if (i == k - 1) {
      if (sigma == 1 && carry.size() == 1) {
        emit(Symbol::X(), carry[0], p[0], level);
      } else if (sigma == 0 && carry.size() == 2) {
        for (auto it = c.blocks.rbegin(); it != c.blocks.rend(); ++it)
          if (it->i_l < 0) {
            it->i_l = i;
            break;
          }
        emit(Symbol::X(), carry[0], carry[1], level);
      } else {
        bad = true;
      }
    } else if (sigma == 1 && carry.size() == 1) {
      Symbol nw = fresh();
      emit(nw, carry[0], p[0], level);
      carry = {nw};
    } else if (sigma == 3 && carry.size() == 1) {
      Symbol a = fresh();
      emit(a, p[0], p[1], level);  // fresh tower from the two leading symbols
      Symbol b = fresh();
      emit(b, carry[0], p[2], level);  // main chain takes the third
      c.blocks.push_back({i, -1, a.windex});
      carry = {a, b};
    } else if (sigma == 2 && carry.size() == 2) {
      Symbol a = fresh();
      emit(a, carry[0], p[0], level);
      Symbol b = fresh();
      emit(b, carry[1], p[1], level);
      carry = {a, b};
    } else if (sigma == 0 && carry.size() == 2) {
      Symbol nw = fresh();
      emit(nw, carry[0], carry[1], level);
      for (auto it = c.blocks.rbegin(); it != c.blocks.rend(); ++it)
        if (it->i_l < 0) {
          it->i_l = i;
          break;
        }
      carry = {nw};
    } else {
      bad = true;
    }
  }

  c.m = std::max(w, 1);
  if (bad || !verify_chain(c)) return generic_decompose(r, s);
  return c;
}

PowerChain generic_decompose(std::int64_t r, std::int64_t s) {
  check_pair(r, s);
  PowerChain c;
  fill_header(c, r, s);
  c.generic = true;
  const int k = c.k;

  // Leaf multiset over the canonical symbol order, tracked as (key, count).
  std::map<int, std::int64_t> counts;
  auto bump = [&](Symbol sym, std::int64_t by) {
    if (by > 0) counts[sym_key(sym)] += by;
  };
  bump(Symbol::U(), s);
  bump(Symbol::T(), r - s);
  bump(Symbol::X(), (std::int64_t(1) << k) - r);

  int w = 0;
  // Rounds 1..k-1 halve the total count 2^k down to 2. Even multiplicities
  // carry as the same symbol (a self-pair needs no new inequality); the odd
  // leftovers are even in number and pair up in symbol order.
  for (int level = 1; level <= k - 1; ++level) {
    std::map<int, std::int64_t> next;
    std::vector<Symbol> leftover;
    for (const auto& [key, cnt] : counts) {
      if (cnt / 2 > 0) next[key] += cnt / 2;
      if (cnt % 2) leftover.push_back(key_sym(key));
    }
    for (size_t i = 0; i + 1 < leftover.size(); i += 2) {
      Symbol nw = Symbol::W(++w);
      c.chain.push_back({nw, leftover[i], leftover[i + 1], level});
      next[sym_key(nw)] += 1;
    }
    counts.swap(next);
  }

  std::vector<Symbol> fin;
  for (const auto& [key, cnt] : counts)
    for (std::int64_t i = 0; i < cnt; ++i) fin.push_back(key_sym(key));
  if (fin.size() != 2) throw VerifyError("pairing construction lost leaves");  // unreachable
  c.chain.push_back({Symbol::X(), fin[0], fin[1], k});

  c.m = std::max(w, 1);
  c.case_tag = PowerChain::CaseTag::case1;
  return c;
}

std::vector<ExpansionRow> expansion_table(const PowerChain& c) {
  if (c.chain.empty() || c.k < 1 || c.k > 120) return {};
  const ChainInequality& fin = c.chain.back();
  if (fin.lhs.tag != Symbol::Tag::X) return {};

  // Definitions grouped by level; each W defined once, before any use.
  std::map<int, const ChainInequality*> def_of;
  std::map<int, std::vector<const ChainInequality*>> defs_at;
  auto use_ok = [&](const Symbol& sym) {
    return sym.tag != Symbol::Tag::W || def_of.count(sym.windex) > 0;
  };
  for (size_t i = 0; i + 1 < c.chain.size(); ++i) {
    const ChainInequality& q = c.chain[i];
    if (q.lhs.tag != Symbol::Tag::W) return {};
    if (!use_ok(q.rhs1) || !use_ok(q.rhs2)) return {};
    if (!def_of.emplace(q.lhs.windex, &q).second) return {};
    if (q.level < 1 || q.level >= fin.level) return {};
    defs_at[q.level].push_back(&q);
  }
  if (!use_ok(fin.rhs1) || !use_ok(fin.rhs2)) return {};

  std::map<int, u128> exps;
  auto add = [&](const Symbol& sym, u128 e) { exps[sym_key(sym)] += e; };
  add(fin.rhs1, 1);
  add(fin.rhs2, 1);

  std::vector<ExpansionRow> rows;
  auto snapshot = [&](int level, int pw) {
    ExpansionRow row{level, pw, {}};
    for (const auto& [key, e] : exps)
      if (e > 0) row.exps.emplace_back(key_sym(key), e);
    rows.push_back(std::move(row));
  };
  snapshot(fin.level, 1);

  int pw = 1;
  for (int level = fin.level - 1; level >= 1; --level) {
    for (auto& kv : exps) kv.second *= 2;
    ++pw;
    auto it = defs_at.find(level);
    if (it != defs_at.end()) {
      for (const ChainInequality* q : it->second) {
        auto e_it = exps.find(sym_key(q->lhs));
        if (e_it == exps.end() || e_it->second == 0) continue;  // unused definition
        u128 e = e_it->second;
        if (e % 2 != 0) return {};  // used at its own level or below
        exps.erase(e_it);
        add(q->rhs1, e / 2);
        add(q->rhs2, e / 2);
      }
    }
    snapshot(level, pw);
  }
  return rows;
}

bool verify_chain(const PowerChain& c) {
  const std::vector<ExpansionRow> rows = expansion_table(c);
  if (rows.empty()) return false;
  const ExpansionRow& last = rows.back();
  if (last.level != 1 || last.pw != c.k) return false;

  u128 eu = 0, et = 0, ex = 0;
  for (const auto& [sym, e] : last.exps) {
    switch (sym.tag) {
      case Symbol::Tag::U: eu = e; break;
      case Symbol::Tag::T: et = e; break;
      case Symbol::Tag::X: ex = e; break;
      case Symbol::Tag::ONE: break;
      case Symbol::Tag::W: return false;
    }
  }
  const u128 target_x = (u128(1) << c.k) - u128(c.r);
  return eu == u128(c.s) && et == u128(c.r - c.s) && ex == target_x;
}

}  // namespace ordmed::pc
