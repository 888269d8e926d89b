#pragma once

#include <cstdint>
#include <string>

namespace ordmed {

// Norm exponent tau = r/s with gcd(r,s) = 1. (1,1) is the l1 marker and
// (2,1) the l2 marker; the power-cone path requires r > s >= 1.
// r is capped below 2^60 so that every exponent appearing in chain
// verification fits in unsigned __int128 with provable headroom.
struct RationalNorm {
  std::int64_t r = 2;
  std::int64_t s = 1;

  RationalNorm() = default;
  RationalNorm(std::int64_t r_, std::int64_t s_);  // validates, does not reduce

  bool is_l1() const { return r == 1 && s == 1; }
  bool is_l2() const { return r == 2 && s == 1; }
  double tau() const { return static_cast<double>(r) / static_cast<double>(s); }
  std::string str() const;  // "r/s"

  bool operator==(const RationalNorm&) const = default;
};

// Accepts "r/s", an integer "3", or a decimal "3.5". Decimals convert to the
// exact reduced fraction of the shortest decimal given (3.5 -> 7/2).
RationalNorm parse_norm(const std::string& text);

std::int64_t gcd64(std::int64_t a, std::int64_t b);

}  // namespace ordmed
