#include "detmat/pattern.hpp"

#include "detmat/errors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>

namespace detmat {

namespace {

void check_dimensions(Eigen::Index m, Eigen::Index n) {
  if (m < 1 || n < 1 || m > kMaxDimension || n > kMaxDimension) {
    throw std::invalid_argument("pattern dimensions must lie in [1, " + std::to_string(kMaxDimension) +
                                "], got " + std::to_string(m) + "x" + std::to_string(n));
  }
}

std::vector<bool> bijection_flags(const IndexSet& perm) {
  std::vector<bool> seen(perm.size(), false);
  for (int v : perm) {
    if (v < 0 || static_cast<std::size_t>(v) >= perm.size() || seen[static_cast<std::size_t>(v)]) {
      throw std::invalid_argument("permutation is not a bijection");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
  return seen;
}

int parse_decimal(std::string_view token, const char* what) {
  int value = 0;
  if (token.empty()) throw ParseError(std::string("missing ") + what + " in header");
  for (char c : token) {
    if (c < '0' || c > '9') throw ParseError(std::string("non-decimal ") + what + " in header");
  }
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(std::string("bad ") + what + " in header");
  }
  return value;
}

}  // namespace

Pattern::Pattern(int m, int n) : Pattern(Incidence::Constant(m, n, false)) {}

Pattern::Pattern(Incidence incidence) : incidence_(std::move(incidence)) {
  check_dimensions(incidence_.rows(), incidence_.cols());
  row_masks_.assign(static_cast<std::size_t>(rows()), 0);
  col_masks_.assign(static_cast<std::size_t>(cols()), 0);
  for (int i = 0; i < rows(); ++i) {
    for (int j = 0; j < cols(); ++j) {
      if (incidence_(i, j)) {
        row_masks_[static_cast<std::size_t>(i)] |= std::uint64_t{1} << j;
        col_masks_[static_cast<std::size_t>(j)] |= std::uint64_t{1} << i;
        ++size_;
      }
    }
  }
}

Pattern Pattern::full(int m, int n) { return Pattern(Incidence::Constant(m, n, true)); }

Pattern Pattern::from_cells(int m, int n, std::span<const Cell> cells) {
  check_dimensions(m, n);
  Incidence inc = Incidence::Constant(m, n, false);
  for (const Cell& c : cells) {
    if (c.row < 0 || c.row >= m || c.col < 0 || c.col >= n) {
      throw std::invalid_argument("cell outside the " + std::to_string(m) + "x" + std::to_string(n) + " grid");
    }
    inc(c.row, c.col) = true;
  }
  return Pattern(std::move(inc));
}

Pattern Pattern::rectangle(int m, int n, const IndexSet& rows, const IndexSet& cols) {
  std::vector<Cell> cells;
  for (int i : rows)
    for (int j : cols) cells.push_back({i, j});
  return from_cells(m, n, cells);
}

int Pattern::row_count(int i) const { return std::popcount(row_mask(i)); }
int Pattern::col_count(int j) const { return std::popcount(col_mask(j)); }

std::vector<Cell> Pattern::cells() const {
  std::vector<Cell> out;
  out.reserve(static_cast<std::size_t>(size_));
  for (int i = 0; i < rows(); ++i)
    for (int j = 0; j < cols(); ++j)
      if (incidence_(i, j)) out.push_back({i, j});
  return out;
}

std::vector<Cell> Pattern::missing_cells() const {
  std::vector<Cell> out;
  for (int i = 0; i < rows(); ++i)
    for (int j = 0; j < cols(); ++j)
      if (!incidence_(i, j)) out.push_back({i, j});
  return out;
}

Pattern Pattern::with(Cell c) const {
  Incidence inc = incidence_;
  inc(c.row, c.col) = true;
  return Pattern(std::move(inc));
}

Pattern Pattern::without(Cell c) const {
  Incidence inc = incidence_;
  inc(c.row, c.col) = false;
  return Pattern(std::move(inc));
}

bool Pattern::is_subset_of(const Pattern& other) const {
  if (rows() != other.rows() || cols() != other.cols()) return false;
  for (int i = 0; i < rows(); ++i)
    if ((row_mask(i) & ~other.row_mask(i)) != 0) return false;
  return true;
}

MatroidContext::MatroidContext(int m, int n, int r) : m_(m), n_(n), r_(r) {
  if (m < 1 || n < 1) throw RegimeError("matrix dimensions must be positive");
  if (r < 1 || r >= std::min(m, n)) {
    throw RegimeError("rank bound r=" + std::to_string(r) + " must satisfy 1 <= r < min(m,n)=" +
                      std::to_string(std::min(m, n)));
  }
}

Pattern parse_pattern(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  // A single trailing newline leaves one empty final piece.
  if (lines.size() > 1 && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front().empty()) throw ParseError("missing header line");

  std::string_view header = lines.front();
  std::size_t space = header.find(' ');
  if (space == std::string_view::npos || header.find(' ', space + 1) != std::string_view::npos) {
    throw ParseError("header must be \"m n\" separated by a single space");
  }
  int m = parse_decimal(header.substr(0, space), "row count");
  int n = parse_decimal(header.substr(space + 1), "column count");
  if (m < 1 || n < 1) throw ParseError("dimensions must be at least 1");
  if (m > kMaxDimension || n > kMaxDimension) {
    throw ParseError("dimensions exceed the supported maximum of " + std::to_string(kMaxDimension));
  }
  if (static_cast<int>(lines.size()) - 1 != m) {
    throw ParseError("expected " + std::to_string(m) + " pattern lines, found " +
                     std::to_string(lines.size() - 1));
  }
  Incidence inc(m, n);
  for (int i = 0; i < m; ++i) {
    std::string_view line = lines[static_cast<std::size_t>(i) + 1];
    if (static_cast<int>(line.size()) != n) {
      throw ParseError("line " + std::to_string(i + 2) + " has " + std::to_string(line.size()) +
                       " characters, expected " + std::to_string(n));
    }
    for (int j = 0; j < n; ++j) {
      char c = line[static_cast<std::size_t>(j)];
      if (c != '0' && c != '1') {
        throw ParseError("illegal character '" + std::string(1, c) + "' at line " + std::to_string(i + 2));
      }
      inc(i, j) = (c == '1');
    }
  }
  return Pattern(std::move(inc));
}

std::string to_text(const Pattern& p) {
  std::string out = std::to_string(p.rows()) + " " + std::to_string(p.cols()) + "\n";
  for (int i = 0; i < p.rows(); ++i) {
    for (int j = 0; j < p.cols(); ++j) out.push_back(p(i, j) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

Pattern read_pattern_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open pattern file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pattern(buf.str());
}

void write_pattern_file(const std::filesystem::path& path, const Pattern& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write pattern file " + path.string());
  out << to_text(p);
}

Pattern transpose(const Pattern& p) { return Pattern(Incidence(p.incidence().transpose())); }

Pattern permute(const Pattern& p, const IndexSet& row_perm, const IndexSet& col_perm) {
  if (static_cast<int>(row_perm.size()) != p.rows() || static_cast<int>(col_perm.size()) != p.cols()) {
    throw std::invalid_argument("permutation length does not match pattern dimensions");
  }
  bijection_flags(row_perm);
  bijection_flags(col_perm);
  Incidence inc = Incidence::Constant(p.rows(), p.cols(), false);
  for (int i = 0; i < p.rows(); ++i)
    for (int j = 0; j < p.cols(); ++j)
      if (p(i, j)) inc(row_perm[static_cast<std::size_t>(i)], col_perm[static_cast<std::size_t>(j)]) = true;
  return Pattern(std::move(inc));
}

Pattern restrict_to(const Pattern& p, const IndexSet& rows, const IndexSet& cols) {
  Incidence inc(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b)
      inc(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = p(rows[a], cols[b]);
  return Pattern(std::move(inc));
}

LineReduction reduce_columns(const Pattern& p, int r) {
  IndexSet kept;
  IndexSet removed;
  for (int j = 0; j < p.cols(); ++j) (p.col_count(j) > r ? kept : removed).push_back(j);
  if (kept.empty()) {
    // Patterns need at least one column; callers test kept.empty() first.
    return {Pattern(p.rows(), 1), kept, removed};
  }
  IndexSet all_rows(static_cast<std::size_t>(p.rows()));
  for (int i = 0; i < p.rows(); ++i) all_rows[static_cast<std::size_t>(i)] = i;
  return {restrict_to(p, all_rows, kept), kept, removed};
}

LineReduction reduce_rows(const Pattern& p, int r) {
  LineReduction t = reduce_columns(transpose(p), r);
  return {transpose(t.pattern), std::move(t.kept), std::move(t.removed)};
}

Pattern stitch(const Pattern& p) {
  Incidence inc = Incidence::Constant(p.rows() + 1, p.cols() + 1, true);
  inc.topLeftCorner(p.rows(), p.cols()) = p.incidence();
  return Pattern(std::move(inc));
}

Pattern excise(const Pattern& p) {
  if (p.rows() < 2 || p.cols() < 2) throw PreconditionError("excise needs at least a 2x2 pattern");
  const Incidence& inc = p.incidence();
  if (!inc.row(p.rows() - 1).all() || !inc.col(p.cols() - 1).all()) {
    throw PreconditionError("excise requires the last row and last column to be fully observed");
  }
  return Pattern(Incidence(inc.topLeftCorner(p.rows() - 1, p.cols() - 1)));
}

bool is_order_convex(const Pattern& p, PathOrder order) {
  // prefix(i, j) = number of observed cells in rows [0, i) x cols [0, j).
  const int m = p.rows();
  const int n = p.cols();
  Eigen::ArrayXXi prefix = Eigen::ArrayXXi::Zero(m + 1, n + 1);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      prefix(i + 1, j + 1) = prefix(i, j + 1) + prefix(i + 1, j) - prefix(i, j) + (p(i, j) ? 1 : 0);
  auto rect_full = [&](int i0, int i1, int j0, int j1) {
    int count = prefix(i1 + 1, j1 + 1) - prefix(i0, j1 + 1) - prefix(i1 + 1, j0) + prefix(i0, j0);
    return count == (i1 - i0 + 1) * (j1 - j0 + 1);
  };
  const std::vector<Cell> cells = p.cells();
  for (const Cell& lo : cells) {
    for (const Cell& hi : cells) {
      if (hi.row < lo.row) continue;
      if (order == PathOrder::AntiDiagonal) {
        if (hi.col > lo.col) continue;
        if (!rect_full(lo.row, hi.row, hi.col, lo.col)) return false;
      } else {
        if (hi.col < lo.col) continue;
        if (!rect_full(lo.row, hi.row, lo.col, hi.col)) return false;
      }
    }
  }
  return true;
}

bool is_ladder(const Pattern& p) {
  return is_order_convex(p, PathOrder::AntiDiagonal) || is_order_convex(p, PathOrder::Diagonal);
}

int count_inside(const Pattern& p, const IndexSet& rows, const IndexSet& cols) {
  const std::uint64_t col_bits = indices_to_mask(cols);
  int count = 0;
  for (int i : rows) count += std::popcount(p.row_mask(i) & col_bits);
  return count;
}

IndexSet mask_to_indices(std::uint64_t mask) {
  IndexSet out;
  while (mask != 0) {
    out.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return out;
}

std::uint64_t indices_to_mask(const IndexSet& idx) {
  std::uint64_t mask = 0;
  for (int i : idx) mask |= std::uint64_t{1} << i;
  return mask;
}

std::string format_index_set(const IndexSet& idx) {
  std::string out = "{";
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(idx[k] + 1);
  }
  return out + "}";
}

}  // namespace detmat
