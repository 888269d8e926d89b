#include "ordmed/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "ordmed/errors.hpp"

namespace ordmed {

int Polynomial::degree() const {
  int deg = 0;
  for (const auto& t : terms) {
    int d = 0;
    for (int e : t.exp) d += e;
    deg = std::max(deg, d);
  }
  return deg;
}

double Polynomial::eval(const std::vector<double>& x) const {
  double acc = 0.0;
  for (const auto& t : terms) {
    double m = t.coef;
    for (std::size_t j = 0; j < t.exp.size(); ++j)
      for (int e = 0; e < t.exp[j]; ++e) m *= x[j];
    acc += m;
  }
  return acc;
}

std::string fmt_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {
// Uniform [0,1) with a fixed 53-bit mantissa mapping; avoids the
// implementation-defined std::uniform_real_distribution.
double next_unit(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }
}  // namespace

std::vector<double> LambdaPreset::make(int n) const {
  if (n < 1) throw ValidationError("lambda preset: n must be >= 1");
  std::vector<double> l(n, 0.0);
  switch (kind) {
    case Kind::weber:
      std::fill(l.begin(), l.end(), 1.0);
      break;
    case Kind::center:
      l[0] = 1.0;
      break;
    case Kind::kcentrum:
      if (k < 1 || k > n)
        throw ValidationError("kcentrum: k = " + std::to_string(k) + " out of range for n = " +
                              std::to_string(n));
      std::fill(l.begin(), l.begin() + k, 1.0);
      break;
    case Kind::range:
      l[0] = 1.0;
      l[n - 1] = n > 1 ? -1.0 : l[n - 1];
      break;
    case Kind::random_monotone: {
      std::mt19937_64 rng(seed);
      for (auto& v : l) v = next_unit(rng);
      std::sort(l.begin(), l.end(), std::greater<double>());
      break;
    }
  }
  return l;
}

std::string LambdaPreset::str() const {
  switch (kind) {
    case Kind::weber: return "weber";
    case Kind::center: return "center";
    case Kind::kcentrum: return "kcentrum:" + std::to_string(k);
    case Kind::range: return "range";
    case Kind::random_monotone: return "random-monotone:" + std::to_string(seed);
  }
  return "?";
}

LambdaPreset parse_preset(const std::string& text) {
  LambdaPreset p;
  std::string head = text, arg;
  if (auto c = text.find(':'); c != std::string::npos) {
    head = text.substr(0, c);
    arg = text.substr(c + 1);
  }
  if (head == "weber") p.kind = LambdaPreset::Kind::weber;
  else if (head == "center") p.kind = LambdaPreset::Kind::center;
  else if (head == "kcentrum") p.kind = LambdaPreset::Kind::kcentrum;
  else if (head == "range") p.kind = LambdaPreset::Kind::range;
  else if (head == "random-monotone") p.kind = LambdaPreset::Kind::random_monotone;
  else throw ParseError("unknown preset '" + text + "'");
  if (p.kind == LambdaPreset::Kind::kcentrum) {
    if (arg.empty()) throw ParseError("kcentrum preset needs ':k'");
    p.k = std::stoi(arg);
  } else if (p.kind == LambdaPreset::Kind::random_monotone && !arg.empty()) {
    p.seed = std::stoull(arg);
  }
  return p;
}

double Instance::box_hi() const {
  double m = 0.0;
  for (const auto& p : points)
    for (double c : p) m = std::max(m, std::abs(c));
  return m;
}

ValidationReport validate(const Instance& inst) {
  if (inst.n() < 1) throw ValidationError("instance: needs at least one point");
  if (inst.d < 1) throw ValidationError("instance: dim must be >= 1");
  for (int i = 0; i < inst.n(); ++i)
    if (static_cast<int>(inst.points[i].size()) != inst.d)
      throw ValidationError("instance: point " + std::to_string(i + 1) + " has length " +
                            std::to_string(inst.points[i].size()) + ", expected dim " +
                            std::to_string(inst.d));
  if (static_cast<int>(inst.omega.size()) != inst.n())
    throw ValidationError("instance: omega length " + std::to_string(inst.omega.size()) +
                          " != n = " + std::to_string(inst.n()));
  if (static_cast<int>(inst.lambda.size()) != inst.n())
    throw ValidationError("instance: lambda length " + std::to_string(inst.lambda.size()) +
                          " != n = " + std::to_string(inst.n()));
  for (const auto& g : inst.region)
    for (const auto& t : g.terms)
      if (static_cast<int>(t.exp.size()) != inst.d)
        throw ValidationError("instance: region polynomial term arity != dim");

  ValidationReport rep;
  rep.dims_ok = true;
  rep.omega_ok = std::all_of(inst.omega.begin(), inst.omega.end(), [](double w) { return w >= 0; });
  if (!rep.omega_ok) rep.notes.push_back("omega has negative entries");
  rep.lambda_monotone = true;
  for (int i = 0; i + 1 < inst.n(); ++i)
    if (inst.lambda[i] < inst.lambda[i + 1]) rep.lambda_monotone = false;
  rep.lambda_nonneg =
      std::all_of(inst.lambda.begin(), inst.lambda.end(), [](double l) { return l >= 0; });
  // RationalNorm construction already enforces coprimality and r >= s.
  rep.norm_power_ok = inst.norm.is_l1() || inst.norm.is_l2() || inst.norm.r > inst.norm.s;
  if (!rep.lambda_monotone) rep.notes.push_back("lambda not nonincreasing: hierarchy-only");
  else if (!rep.lambda_nonneg) rep.notes.push_back("lambda has negative entries: hierarchy-only");
  return rep;
}

Instance generate(int n, int d, std::uint64_t seed, double box_hi, const LambdaPreset& preset,
                  RationalNorm norm, bool random_omega) {
  if (n < 1 || d < 1 || box_hi <= 0) throw ValidationError("generate: need n,d >= 1 and box > 0");
  Instance inst;
  inst.d = d;
  inst.norm = norm;
  std::mt19937_64 rng(seed);
  inst.points.resize(n);
  for (auto& p : inst.points) {
    p.resize(d);
    for (auto& c : p) c = next_unit(rng) * box_hi;
  }
  inst.omega.resize(n, 1.0);
  if (random_omega)
    for (auto& w : inst.omega) w = 0.5 + next_unit(rng);
  inst.lambda = preset.make(n);
  return inst;
}

namespace {

std::string poly_to_text(const Polynomial& g) {
  std::string out;
  for (std::size_t t = 0; t < g.terms.size(); ++t) {
    if (t) out += " + ";
    out += fmt_double(g.terms[t].coef);
    for (std::size_t j = 0; j < g.terms[t].exp.size(); ++j)
      if (g.terms[t].exp[j] != 0)
        out += "*x" + std::to_string(j + 1) + "^" + std::to_string(g.terms[t].exp[j]);
  }
  return out;
}

Polynomial poly_from_text(const std::string& text, int d, int line_no) {
  Polynomial g;
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) {
    throw ParseError("line " + std::to_string(line_no) + ": region polynomial: " + why);
  };
  while (pos < text.size()) {
    std::size_t next = text.find(" + ", pos);
    std::string term =
        next == std::string::npos ? text.substr(pos) : text.substr(pos, next - pos);
    pos = next == std::string::npos ? text.size() : next + 3;
    Polynomial::Term t;
    t.exp.assign(d, 0);
    std::stringstream ss(term);
    std::string factor;
    bool first = true;
    while (std::getline(ss, factor, '*')) {
      if (first) {
        const char* b = factor.data();
        auto res = std::from_chars(b, b + factor.size(), t.coef);
        if (res.ec != std::errc() || res.ptr != b + factor.size()) fail("bad coefficient '" + factor + "'");
        first = false;
        continue;
      }
      if (factor.size() < 2 || factor[0] != 'x') fail("bad factor '" + factor + "'");
      auto caret = factor.find('^');
      int var = 0, e = 1;
      try {
        var = std::stoi(factor.substr(1, caret == std::string::npos ? std::string::npos
                                                                    : caret - 1));
        if (caret != std::string::npos) e = std::stoi(factor.substr(caret + 1));
      } catch (const std::exception&) {
        fail("bad factor '" + factor + "'");
      }
      if (var < 1 || var > d) fail("variable index out of range in '" + factor + "'");
      if (e < 0) fail("negative exponent in '" + factor + "'");
      t.exp[var - 1] += e;
    }
    if (first) fail("empty term");
    g.terms.push_back(std::move(t));
  }
  if (g.terms.empty()) fail("empty polynomial");
  return g;
}

}  // namespace

std::string save_instance(const Instance& inst) {
  std::string out = "ordmed-instance v1\n";
  out += "dim " + std::to_string(inst.d) + "\n";
  out += "n " + std::to_string(inst.n()) + "\n";
  out += "norm " + inst.norm.str() + "\n";
  for (int i = 0; i < inst.n(); ++i) {
    out += "point " + std::to_string(i + 1);
    for (double c : inst.points[i]) out += " " + fmt_double(c);
    out += "\n";
  }
  for (int i = 0; i < inst.n(); ++i)
    out += "omega " + std::to_string(i + 1) + " " + fmt_double(inst.omega[i]) + "\n";
  for (int i = 0; i < inst.n(); ++i)
    out += "lambda " + std::to_string(i + 1) + " " + fmt_double(inst.lambda[i]) + "\n";
  for (std::size_t k = 0; k < inst.region.size(); ++k)
    out += "g " + std::to_string(k + 1) + " : " + poly_to_text(inst.region[k]) + "\n";
  return out;
}

Instance load_instance(const std::string& bytes) {
  std::istringstream in(bytes);
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  auto fail = [&](const std::string& field, const std::string& why) {
    throw ParseError("line " + std::to_string(line_no) + ": " + field + ": " + why);
  };

  if (!next_line() || line != "ordmed-instance v1")
    throw ParseError("line 1: header: expected 'ordmed-instance v1'");

  Instance inst;
  int n = -1;
  bool have_norm = false;
  std::vector<bool> seen_p, seen_o, seen_l;
  auto parse_index = [&](std::istringstream& ss, const std::string& field) {
    int i = 0;
    if (!(ss >> i) || i < 1 || i > n) fail(field, "index out of range");
    return i - 1;
  };

  while (next_line()) {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "dim") {
      if (!(ss >> inst.d) || inst.d < 1) fail("dim", "expected positive integer");
    } else if (key == "n") {
      if (!(ss >> n) || n < 1) fail("n", "expected positive integer");
      inst.points.assign(n, {});
      inst.omega.assign(n, 0.0);
      inst.lambda.assign(n, 0.0);
      seen_p.assign(n, false);
      seen_o.assign(n, false);
      seen_l.assign(n, false);
    } else if (key == "norm") {
      std::string v;
      if (!(ss >> v)) fail("norm", "missing value");
      inst.norm = parse_norm(v);
      have_norm = true;
    } else if (key == "point") {
      if (n < 0 || inst.d < 1) fail("point", "dim/n must come first");
      int i = parse_index(ss, "point");
      inst.points[i].resize(inst.d);
      for (int j = 0; j < inst.d; ++j)
        if (!(ss >> inst.points[i][j])) fail("point", "expected " + std::to_string(inst.d) + " coordinates");
      seen_p[i] = true;
    } else if (key == "omega") {
      if (n < 0) fail("omega", "n must come first");
      int i = parse_index(ss, "omega");
      if (!(ss >> inst.omega[i])) fail("omega", "missing value");
      seen_o[i] = true;
    } else if (key == "lambda") {
      if (n < 0) fail("lambda", "n must come first");
      int i = parse_index(ss, "lambda");
      if (!(ss >> inst.lambda[i])) fail("lambda", "missing value");
      seen_l[i] = true;
    } else if (key == "g") {
      if (inst.d < 1) fail("g", "dim must come first");
      int k;
      std::string colon;
      if (!(ss >> k >> colon) || colon != ":") fail("g", "expected 'g <k> : <terms>'");
      auto colon_at = line.find(" : ");
      inst.region.push_back(poly_from_text(line.substr(colon_at + 3), inst.d, line_no));
    } else {
      fail(key, "unknown directive");
    }
  }
  if (n < 0) throw ParseError("missing 'n' line");
  if (!have_norm) throw ParseError("missing 'norm' line");
  for (int i = 0; i < n; ++i) {
    if (!seen_p[i]) throw ParseError("point " + std::to_string(i + 1) + " missing");
    if (!seen_o[i]) throw ParseError("omega " + std::to_string(i + 1) + " missing");
    if (!seen_l[i]) throw ParseError("lambda " + std::to_string(i + 1) + " missing");
  }
  return inst;
}

}  // namespace ordmed
