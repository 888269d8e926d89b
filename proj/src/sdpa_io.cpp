#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ordmed/conic.hpp"
#include "ordmed/errors.hpp"
#include "ordmed/instance.hpp"
#include "ordmed/reduce.hpp"

namespace ordmed::co {
namespace {

// One coefficient of constraint matrix F_matno (matno 0 is F0). Entries are
// stored upper-triangle (i <= j), 1-based, as the file format requires.
struct SdpaEntry {
  int matno = 0, blkno = 0, i = 0, j = 0;
  double val = 0.0;
  bool operator<(const SdpaEntry& o) const {
    return std::tie(matno, blkno, i, j) < std::tie(o.matno, o.blkno, o.i, o.j);
  }
};

// The file encodes  min c.x  s.t.  X(x) = sum_i x_i F_i - F0 >= 0  over a
// block-diagonal X. Our reduced form s = h - G x in K maps onto it with
// F_i = -G(:,i) and F0 = -h per block; equalities become paired rows of the
// diagonal block. svec off-diagonals carry a sqrt(2) factor relative to the
// matrix entries F refers to, hence the division below.
void emit_block_entries(const ReducedForm& rf, const std::vector<int>& diag_pos,
                        const std::vector<int>& blk_of_row, std::vector<SdpaEntry>& out) {
  const double inv_rt2 = 1.0 / std::sqrt(2.0);
  // svec component -> (i, j) with i >= j, per psd row cone
  std::vector<std::pair<int, int>> coord(rf.nsrows, {0, 0});
  for (const RowCone& rc : rf.rows) {
    if (rc.kind != ConeKind::psd) continue;
    int l = 0;
    for (int j = 0; j < rc.size; ++j)
      for (int i = j; i < rc.size; ++i) coord[rc.offset + l++] = {i, j};
  }
  auto push = [&](int matno, int row, double val) {
    if (val == 0.0) return;
    if (diag_pos[row] >= 0) {
      const int p = diag_pos[row] + 1;
      out.push_back({matno, 1, p, p, val});
      return;
    }
    const auto [i, j] = coord[row];
    const double scale = (i == j) ? 1.0 : inv_rt2;
    out.push_back({matno, blk_of_row[row], j + 1, i + 1, val * scale});
  };
  for (const Triplet& t : rf.G) push(t.col + 1, t.row, -t.val);
  for (int r = 0; r < rf.nsrows; ++r) push(0, r, -rf.h[r]);
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t k = line.find_first_not_of(" \t");
    if (k == std::string::npos) continue;
    if (line[k] == '*' || line[k] == '"') continue;
    lines.push_back(line);
  }
  return lines;
}

// Block size tokens may be wrapped in {} () or separated by commas.
std::vector<int> parse_block_sizes(const std::string& line, int nblocks) {
  std::string clean = line;
  for (char& ch : clean)
    if (ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == ',') ch = ' ';
  std::istringstream in(clean);
  std::vector<int> sizes;
  int v = 0;
  while (in >> v) sizes.push_back(v);
  if (static_cast<int>(sizes.size()) != nblocks)
    throw ParseError("sdpa import: expected " + std::to_string(nblocks) + " block sizes, got " +
                     std::to_string(sizes.size()));
  return sizes;
}

}  // namespace

std::string export_sdpa(const ConicProgram& prog) {
  ConicProgram p = prog;
  canonicalize(p);
  validate_program(p);
  for (const Cone& cn : p.cones)
    if (cn.kind == ConeKind::soc || cn.kind == ConeKind::rsoc)
      throw ValidationError("sdpa export: " + cone_name(cn.kind) +
                            " cone has no SDPA block form; convert with rsoc_to_psd first");

  const ReducedForm rf = reduce(p);

  // Block layout: one diagonal block holding every scalar inequality and the
  // paired rows of surviving equalities, then one matrix block per psd cone.
  std::vector<int> diag_pos(rf.nsrows, -1);
  std::vector<int> blk_of_row(rf.nsrows, 0);
  int ndiag = 0;
  for (const RowCone& rc : rf.rows)
    if (rc.kind == ConeKind::nonneg)
      for (int k = 0; k < rc.dim; ++k) diag_pos[rc.offset + k] = ndiag++;
  const int eq_base = ndiag;
  ndiag += 2 * rf.neq;

  std::vector<int> blk_sizes;
  if (ndiag > 0) blk_sizes.push_back(-ndiag);
  const int first_psd_blk = ndiag > 0 ? 2 : 1;
  {
    int bn = first_psd_blk;
    for (const RowCone& rc : rf.rows)
      if (rc.kind == ConeKind::psd) {
        for (int k = 0; k < rc.dim; ++k) blk_of_row[rc.offset + k] = bn;
        blk_sizes.push_back(rc.size);
        ++bn;
      }
  }

  std::vector<SdpaEntry> entries;
  emit_block_entries(rf, diag_pos, blk_of_row, entries);
  for (const Triplet& t : rf.Aeq) {
    const int p = eq_base + 2 * t.row + 1;
    entries.push_back({t.col + 1, 1, p, p, t.val});
    entries.push_back({t.col + 1, 1, p + 1, p + 1, -t.val});
  }
  for (int k = 0; k < rf.neq; ++k) {
    if (rf.beq[k] == 0.0) continue;
    const int p = eq_base + 2 * k + 1;
    entries.push_back({0, 1, p, p, rf.beq[k]});
    entries.push_back({0, 1, p + 1, p + 1, -rf.beq[k]});
  }
  std::sort(entries.begin(), entries.end());

  std::string out;
  out += "* SDPA sparse export (ordmed)\n";
  out += "* problem: min c.x  s.t.  X(x) = sum_i x_i F_i - F0 >= 0\n";
  out += "* objective constant: " + fmt_double(rf.c0) + "\n";
  out += std::to_string(rf.nx) + "\n";
  out += std::to_string(blk_sizes.size()) + "\n";
  for (std::size_t k = 0; k < blk_sizes.size(); ++k)
    out += (k ? " " : "") + std::to_string(blk_sizes[k]);
  out += "\n";
  for (int k = 0; k < rf.nx; ++k) out += (k ? " " : "") + fmt_double(rf.c[k]);
  out += "\n";
  for (const SdpaEntry& e : entries)
    out += std::to_string(e.matno) + " " + std::to_string(e.blkno) + " " + std::to_string(e.i) +
           " " + std::to_string(e.j) + " " + fmt_double(e.val) + "\n";
  return out;
}

ConicProgram import_sdpa(const std::string& text) {
  double c0 = 0.0;
  {
    const std::string tag = "objective constant:";
    const std::size_t at = text.find(tag);
    if (at != std::string::npos) c0 = std::stod(text.substr(at + tag.size()));
  }
  std::vector<std::string> lines = data_lines(text);
  if (lines.size() < 2) throw ParseError("sdpa import: truncated header");
  std::size_t ln = 0;
  int m = 0, nblocks = 0;
  try {
    m = std::stoi(lines[ln++]);
    nblocks = std::stoi(lines[ln++]);
  } catch (const std::exception&) {
    throw ParseError("sdpa import: bad m / nblocks header");
  }
  if (m < 0 || nblocks < 0) throw ParseError("sdpa import: negative counts");
  std::vector<int> sizes;
  if (nblocks > 0) {
    if (ln >= lines.size()) throw ParseError("sdpa import: missing block size line");
    sizes = parse_block_sizes(lines[ln++], nblocks);
  }
  std::vector<double> cvec(m, 0.0);
  if (m > 0) {
    if (ln >= lines.size()) throw ParseError("sdpa import: missing objective line");
    std::istringstream in(lines[ln++]);
    for (int k = 0; k < m; ++k)
      if (!(in >> cvec[k])) throw ParseError("sdpa import: objective line too short");
  }

  ConicProgram prog;
  const int x0 = m > 0 ? prog.add_cols(ConeKind::free_, m) : 0;
  for (int k = 0; k < m; ++k) prog.obj(x0 + k, cvec[k]);
  prog.obj_const = c0;

  // Per block: slack columns and one tying row per stored component.
  const double rt2 = std::sqrt(2.0);
  std::vector<int> blk_row0(nblocks, 0), blk_col0(nblocks, 0);
  for (int bk = 0; bk < nblocks; ++bk) {
    if (sizes[bk] == 0) throw ParseError("sdpa import: zero block size");
    if (sizes[bk] < 0) {
      blk_col0[bk] = prog.add_cols(ConeKind::nonneg, -sizes[bk]);
      blk_row0[bk] = prog.nrows;
      for (int k = 0; k < -sizes[bk]; ++k) {
        const int r = prog.add_row(0.0);
        prog.entry(r, blk_col0[bk] + k, 1.0);
      }
    } else {
      blk_col0[bk] = prog.add_cols(ConeKind::psd, sizes[bk]);
      blk_row0[bk] = prog.nrows;
      for (int k = 0; k < svec_dim(sizes[bk]); ++k) {
        const int r = prog.add_row(0.0);
        prog.entry(r, blk_col0[bk] + k, 1.0);
      }
    }
  }

  for (; ln < lines.size(); ++ln) {
    std::istringstream in(lines[ln]);
    int matno = 0, blkno = 0, i = 0, j = 0;
    double val = 0.0;
    if (!(in >> matno >> blkno >> i >> j >> val))
      throw ParseError("sdpa import: bad entry line: " + lines[ln]);
    if (matno < 0 || matno > m) throw ParseError("sdpa import: matrix index out of range");
    if (blkno < 1 || blkno > nblocks) throw ParseError("sdpa import: block index out of range");
    const int bk = blkno - 1;
    int row = 0;
    double scale = 1.0;
    if (sizes[bk] < 0) {
      if (i != j || i < 1 || i > -sizes[bk])
        throw ParseError("sdpa import: diagonal block entry off the diagonal");
      row = blk_row0[bk] + (i - 1);
    } else {
      if (i < 1 || j < i || j > sizes[bk])
        throw ParseError("sdpa import: matrix entry not upper-triangular in range");
      row = blk_row0[bk] + svec_index(sizes[bk], j - 1, i - 1);
      scale = (i == j) ? 1.0 : rt2;
    }
    // The reconstructed row reads (G x) + slack = h with G = -F_i * scale and
    // h = -F0 * scale, so reducing it recovers s = h - G x exactly.
    if (matno == 0)
      prog.b[row] = -val * scale;
    else
      prog.entry(row, x0 + matno - 1, -val * scale);
  }
  canonicalize(prog);
  validate_program(prog);
  return prog;
}

}  // namespace ordmed::co
