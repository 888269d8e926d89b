#include "ordmed/rational.hpp"

#include <cctype>

#include "ordmed/errors.hpp"

namespace ordmed {

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  while (b != 0) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

namespace {
constexpr std::int64_t kMaxR = std::int64_t{1} << 60;
}

RationalNorm::RationalNorm(std::int64_t r_, std::int64_t s_) : r(r_), s(s_) {
  if (r < 1 || s < 1) throw ValidationError("norm: r and s must be positive, got " + str());
  if (r >= kMaxR) throw ValidationError("norm: r must be < 2^60, got " + std::to_string(r));
  if (gcd64(r, s) != 1)
    throw ValidationError("norm: gcd(" + std::to_string(r) + "," + std::to_string(s) +
                          ") = " + std::to_string(gcd64(r, s)) + " != 1");
  if (r < s) throw ValidationError("norm: tau = r/s must be >= 1, got " + str());
}

std::string RationalNorm::str() const { return std::to_string(r) + "/" + std::to_string(s); }

RationalNorm parse_norm(const std::string& text) {
  if (text.empty()) throw ParseError("norm: empty");
  auto parse_int = [&](const std::string& part) -> std::int64_t {
    if (part.empty()) throw ParseError("norm: malformed '" + text + "'");
    for (char c : part)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw ParseError("norm: malformed '" + text + "'");
    if (part.size() > 18) throw ParseError("norm: value too large in '" + text + "'");
    return std::stoll(part);
  };
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    std::int64_t r = parse_int(text.substr(0, slash));
    std::int64_t s = parse_int(text.substr(slash + 1));
    return RationalNorm(r, s);
  }
  auto dot = text.find('.');
  if (dot == std::string::npos) return RationalNorm(parse_int(text), 1);
  // Decimal: numerator over 10^frac_digits, then reduce exactly.
  std::string ip = text.substr(0, dot), fp = text.substr(dot + 1);
  while (!fp.empty() && fp.back() == '0') fp.pop_back();  // shortest decimal
  if (fp.empty()) return RationalNorm(parse_int(ip.empty() ? "0" : ip), 1);
  std::int64_t num = parse_int((ip.empty() ? "" : ip) + fp);
  std::int64_t den = 1;
  for (std::size_t i = 0; i < fp.size(); ++i) {
    if (den > kMaxR / 10) throw ParseError("norm: too many decimal digits in '" + text + "'");
    den *= 10;
  }
  std::int64_t g = gcd64(num, den);
  return RationalNorm(num / g, den / g);
}

}  // namespace ordmed
