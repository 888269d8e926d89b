#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "ordmed/conic.hpp"
#include "ordmed/errors.hpp"
#include "ordmed/instance.hpp"

namespace ordmed::co {
namespace {

std::string cbf_kind(ConeKind k) {
  switch (k) {
    case ConeKind::free_: return "F";
    case ConeKind::nonneg: return "L+";
    case ConeKind::soc: return "Q";
    case ConeKind::rsoc: return "QR";
    case ConeKind::psd: break;
  }
  throw ValidationError("cbf export: psd cones travel as PSDVAR, not as a scalar group");
}

ConeKind kind_from_cbf(const std::string& s) {
  if (s == "F") return ConeKind::free_;
  if (s == "L+") return ConeKind::nonneg;
  if (s == "Q") return ConeKind::soc;
  if (s == "QR") return ConeKind::rsoc;
  throw ParseError("cbf import: unsupported scalar cone '" + s + "'");
}

// svec component -> lower-triangle matrix coordinate and the factor that
// turns a coefficient on the svec column into the symmetric-matrix
// coefficient CBF expects (off-diagonals count twice in <F, X>).
struct SvecCoord {
  int i = 0, j = 0;
  double fscale = 1.0;
};

std::vector<SvecCoord> svec_coords(int size) {
  std::vector<SvecCoord> v(svec_dim(size));
  const double inv_rt2 = 1.0 / std::sqrt(2.0);
  int l = 0;
  for (int j = 0; j < size; ++j)
    for (int i = j; i < size; ++i) {
      v[l++] = {i, j, i == j ? 1.0 : inv_rt2};
    }
  return v;
}

struct Section {
  std::string name;
  std::vector<std::string> lines;
};

bool is_section_keyword(const std::string& s) {
  static const char* names[] = {"VER",       "OBJSENSE",  "PSDVAR", "VAR",    "INT",
                                "PSDCON",    "CON",       "OBJFCOORD", "OBJACOORD",
                                "OBJBCOORD", "FCOORD",    "ACOORD", "BCOORD", "HCOORD",
                                "DCOORD"};
  for (const char* n : names)
    if (s == n) return true;
  return false;
}

std::vector<Section> split_sections(const std::string& text) {
  std::vector<Section> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t a = line.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const std::size_t b = line.find_last_not_of(" \t");
    line = line.substr(a, b - a + 1);
    if (line[0] == '#') continue;
    if (is_section_keyword(line))
      out.push_back({line, {}});
    else if (!out.empty())
      out.back().lines.push_back(line);
    else
      throw ParseError("cbf import: data before the first section keyword");
  }
  return out;
}

}  // namespace

std::string export_cbf(const ConicProgram& prog) {
  ConicProgram p = prog;
  canonicalize(p);
  validate_program(p);

  int nscalar = 0;
  std::vector<const Cone*> scalar_cones, psd_cones;
  for (const Cone& cn : p.cones) {
    if (cn.kind == ConeKind::psd) {
      psd_cones.push_back(&cn);
    } else {
      if (!psd_cones.empty())
        throw ValidationError("cbf export: psd cones must occupy the trailing columns");
      scalar_cones.push_back(&cn);
      nscalar += cn.dim;
    }
  }
  // column -> (psd var, svec coordinate) for the trailing psd columns
  std::vector<int> psd_of_col(p.ncols, -1);
  std::vector<SvecCoord> coord_of_col(p.ncols);
  for (std::size_t k = 0; k < psd_cones.size(); ++k) {
    const auto coords = svec_coords(psd_cones[k]->size);
    for (int l = 0; l < psd_cones[k]->dim; ++l) {
      psd_of_col[psd_cones[k]->offset + l] = static_cast<int>(k);
      coord_of_col[psd_cones[k]->offset + l] = coords[l];
    }
  }

  std::string out = "VER\n3\n";
  out += "\nOBJSENSE\nMIN\n";
  if (!psd_cones.empty()) {
    out += "\nPSDVAR\n" + std::to_string(psd_cones.size()) + "\n";
    for (const Cone* cn : psd_cones) out += std::to_string(cn->size) + "\n";
  }
  if (nscalar > 0) {
    out += "\nVAR\n" + std::to_string(nscalar) + " " + std::to_string(scalar_cones.size()) + "\n";
    for (const Cone* cn : scalar_cones)
      out += cbf_kind(cn->kind) + " " + std::to_string(cn->dim) + "\n";
  }
  if (p.nrows > 0) out += "\nCON\n" + std::to_string(p.nrows) + " 1\nL= " + std::to_string(p.nrows) + "\n";

  std::string objf, obja;
  int nobjf = 0, nobja = 0;
  for (int col = 0; col < p.ncols; ++col) {
    if (p.c[col] == 0.0) continue;
    if (psd_of_col[col] >= 0) {
      const SvecCoord& sc = coord_of_col[col];
      objf += std::to_string(psd_of_col[col]) + " " + std::to_string(sc.i) + " " +
              std::to_string(sc.j) + " " + fmt_double(p.c[col] * sc.fscale) + "\n";
      ++nobjf;
    } else {
      obja += std::to_string(col) + " " + fmt_double(p.c[col]) + "\n";
      ++nobja;
    }
  }
  if (nobjf > 0) out += "\nOBJFCOORD\n" + std::to_string(nobjf) + "\n" + objf;
  if (nobja > 0) out += "\nOBJACOORD\n" + std::to_string(nobja) + "\n" + obja;
  if (p.obj_const != 0.0) out += "\nOBJBCOORD\n" + fmt_double(p.obj_const) + "\n";

  std::string fco, aco;
  int nf = 0, na = 0;
  for (const Triplet& t : p.A) {
    if (psd_of_col[t.col] >= 0) {
      const SvecCoord& sc = coord_of_col[t.col];
      fco += std::to_string(t.row) + " " + std::to_string(psd_of_col[t.col]) + " " +
             std::to_string(sc.i) + " " + std::to_string(sc.j) + " " +
             fmt_double(t.val * sc.fscale) + "\n";
      ++nf;
    } else {
      aco += std::to_string(t.row) + " " + std::to_string(t.col) + " " + fmt_double(t.val) + "\n";
      ++na;
    }
  }
  if (nf > 0) out += "\nFCOORD\n" + std::to_string(nf) + "\n" + fco;
  if (na > 0) out += "\nACOORD\n" + std::to_string(na) + "\n" + aco;
  std::string bco;
  int nb = 0;
  for (int r = 0; r < p.nrows; ++r) {
    if (p.b[r] == 0.0) continue;
    bco += std::to_string(r) + " " + fmt_double(-p.b[r]) + "\n";
    ++nb;
  }
  if (nb > 0) out += "\nBCOORD\n" + std::to_string(nb) + "\n" + bco;
  return out;
}

ConicProgram import_cbf(const std::string& text) {
  const std::vector<Section> sections = split_sections(text);

  bool saw_ver = false;
  std::vector<int> psd_sizes;
  std::vector<std::pair<ConeKind, int>> var_groups;
  int ncon = 0;
  const Section* objf = nullptr;
  const Section* obja = nullptr;
  const Section* objb = nullptr;
  const Section* fco = nullptr;
  const Section* aco = nullptr;
  const Section* bco = nullptr;

  for (const Section& sec : sections) {
    std::istringstream head(sec.lines.empty() ? std::string() : sec.lines[0]);
    if (sec.name == "VER") {
      int v = 0;
      if (sec.lines.size() != 1 || !(head >> v) || v < 1 || v > 3)
        throw ParseError("cbf import: unsupported version");
      saw_ver = true;
    } else if (sec.name == "OBJSENSE") {
      if (sec.lines.size() != 1 || sec.lines[0] != "MIN")
        throw ParseError("cbf import: only OBJSENSE MIN is supported");
    } else if (sec.name == "PSDVAR") {
      int n = 0;
      if (!(head >> n) || n < 0 || sec.lines.size() != static_cast<std::size_t>(n) + 1)
        throw ParseError("cbf import: malformed PSDVAR section");
      for (int k = 0; k < n; ++k) psd_sizes.push_back(std::stoi(sec.lines[k + 1]));
    } else if (sec.name == "VAR") {
      int n = 0, g = 0;
      if (!(head >> n >> g) || sec.lines.size() != static_cast<std::size_t>(g) + 1)
        throw ParseError("cbf import: malformed VAR section");
      int covered = 0;
      for (int k = 0; k < g; ++k) {
        std::istringstream ls(sec.lines[k + 1]);
        std::string kind;
        int dim = 0;
        if (!(ls >> kind >> dim) || dim < 1) throw ParseError("cbf import: bad VAR group");
        var_groups.push_back({kind_from_cbf(kind), dim});
        covered += dim;
      }
      if (covered != n) throw ParseError("cbf import: VAR groups do not cover the variables");
    } else if (sec.name == "CON") {
      int n = 0, g = 0;
      if (!(head >> n >> g) || sec.lines.size() != static_cast<std::size_t>(g) + 1)
        throw ParseError("cbf import: malformed CON section");
      int covered = 0;
      for (int k = 0; k < g; ++k) {
        std::istringstream ls(sec.lines[k + 1]);
        std::string kind;
        int dim = 0;
        if (!(ls >> kind >> dim)) throw ParseError("cbf import: bad CON group");
        if (kind != "L=")
          throw ParseError("cbf import: unsupported constraint cone '" + kind + "'");
        covered += dim;
      }
      if (covered != n) throw ParseError("cbf import: CON groups do not cover the rows");
      ncon = n;
    } else if (sec.name == "OBJFCOORD") {
      objf = &sec;
    } else if (sec.name == "OBJACOORD") {
      obja = &sec;
    } else if (sec.name == "OBJBCOORD") {
      objb = &sec;
    } else if (sec.name == "FCOORD") {
      fco = &sec;
    } else if (sec.name == "ACOORD") {
      aco = &sec;
    } else if (sec.name == "BCOORD") {
      bco = &sec;
    } else {
      throw ParseError("cbf import: unsupported section " + sec.name);
    }
  }
  if (!saw_ver) throw ParseError("cbf import: missing VER section");

  ConicProgram prog;
  for (const auto& [kind, dim] : var_groups) prog.add_cols(kind, dim);
  std::vector<int> psd_off(psd_sizes.size(), 0);
  for (std::size_t k = 0; k < psd_sizes.size(); ++k)
    psd_off[k] = prog.add_cols(ConeKind::psd, psd_sizes[k]);
  for (int r = 0; r < ncon; ++r) prog.add_row(0.0);

  const double rt2 = std::sqrt(2.0);
  auto check_count = [](const Section* sec) {
    int n = 0;
    std::istringstream head(sec->lines.empty() ? std::string() : sec->lines[0]);
    if (!(head >> n) || sec->lines.size() != static_cast<std::size_t>(n) + 1)
      throw ParseError("cbf import: malformed " + sec->name + " section");
    return n;
  };
  auto psd_col = [&](int var, int i, int j) {
    if (var < 0 || var >= static_cast<int>(psd_sizes.size()))
      throw ParseError("cbf import: psd variable index out of range");
    const int size = psd_sizes[var];
    if (j < 0 || i < j || i >= size)
      throw ParseError("cbf import: psd coordinate not lower-triangular in range");
    return psd_off[var] + svec_index(size, i, j);
  };

  if (obja) {
    const int n = check_count(obja);
    for (int k = 0; k < n; ++k) {
      std::istringstream ls(obja->lines[k + 1]);
      int j = 0;
      double v = 0.0;
      if (!(ls >> j >> v)) throw ParseError("cbf import: bad OBJACOORD line");
      if (j < 0 || j >= prog.ncols) throw ParseError("cbf import: variable index out of range");
      prog.c[j] += v;
    }
  }
  if (objf) {
    const int n = check_count(objf);
    for (int k = 0; k < n; ++k) {
      std::istringstream ls(objf->lines[k + 1]);
      int var = 0, i = 0, j = 0;
      double v = 0.0;
      if (!(ls >> var >> i >> j >> v)) throw ParseError("cbf import: bad OBJFCOORD line");
      prog.c[psd_col(var, i, j)] += v * (i == j ? 1.0 : rt2);
    }
  }
  if (objb) {
    if (objb->lines.size() != 1) throw ParseError("cbf import: malformed OBJBCOORD section");
    prog.obj_const = std::stod(objb->lines[0]);
  }
  if (aco) {
    const int n = check_count(aco);
    for (int k = 0; k < n; ++k) {
      std::istringstream ls(aco->lines[k + 1]);
      int r = 0, j = 0;
      double v = 0.0;
      if (!(ls >> r >> j >> v)) throw ParseError("cbf import: bad ACOORD line");
      if (r < 0 || r >= ncon || j < 0 || j >= prog.ncols)
        throw ParseError("cbf import: ACOORD index out of range");
      prog.entry(r, j, v);
    }
  }
  if (fco) {
    const int n = check_count(fco);
    for (int k = 0; k < n; ++k) {
      std::istringstream ls(fco->lines[k + 1]);
      int r = 0, var = 0, i = 0, j = 0;
      double v = 0.0;
      if (!(ls >> r >> var >> i >> j >> v)) throw ParseError("cbf import: bad FCOORD line");
      if (r < 0 || r >= ncon) throw ParseError("cbf import: FCOORD row out of range");
      prog.entry(r, psd_col(var, i, j), v * (i == j ? 1.0 : rt2));
    }
  }
  if (bco) {
    const int n = check_count(bco);
    for (int k = 0; k < n; ++k) {
      std::istringstream ls(bco->lines[k + 1]);
      int r = 0;
      double v = 0.0;
      if (!(ls >> r >> v)) throw ParseError("cbf import: bad BCOORD line");
      if (r < 0 || r >= ncon) throw ParseError("cbf import: BCOORD row out of range");
      prog.b[r] = -v;
    }
  }
  canonicalize(prog);
  validate_program(prog);
  return prog;
}

}  // namespace ordmed::co
