#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace detmat {

using Incidence = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using IndexSet = std::vector<int>;

/// Largest supported row or column count; rows and columns are handled as 64-bit masks.
inline constexpr int kMaxDimension = 64;

/// Zero-based matrix position.
struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// An observation pattern: the set of observed positions of an m x n matrix,
/// held as its incidence bit-matrix. Values are immutable; every transform
/// returns a new pattern.
class Pattern {
 public:
  /// Empty pattern on an m x n grid.
  Pattern(int m, int n);
  explicit Pattern(Incidence incidence);

  template <typename Derived>
  static Pattern from_expression(const Eigen::ArrayBase<Derived>& expr) {
    return Pattern(Incidence(expr.template cast<bool>()));
  }
  static Pattern full(int m, int n);
  static Pattern from_cells(int m, int n, std::span<const Cell> cells);
  /// Rectangle rows x cols inside an m x n grid.
  static Pattern rectangle(int m, int n, const IndexSet& rows, const IndexSet& cols);

  int rows() const { return static_cast<int>(incidence_.rows()); }
  int cols() const { return static_cast<int>(incidence_.cols()); }
  bool operator()(int i, int j) const { return incidence_(i, j); }
  bool contains(Cell c) const { return incidence_(c.row, c.col); }
  const Incidence& incidence() const { return incidence_; }

  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  int row_count(int i) const;
  int col_count(int j) const;
  /// Bit j set iff (i, j) is observed.
  std::uint64_t row_mask(int i) const { return row_masks_[static_cast<std::size_t>(i)]; }
  /// Bit i set iff (i, j) is observed.
  std::uint64_t col_mask(int j) const { return col_masks_[static_cast<std::size_t>(j)]; }

  /// Observed cells in row-major order.
  std::vector<Cell> cells() const;
  /// Unobserved cells in row-major order.
  std::vector<Cell> missing_cells() const;

  Pattern with(Cell c) const;
  Pattern without(Cell c) const;
  bool is_subset_of(const Pattern& other) const;

  friend bool operator==(const Pattern& a, const Pattern& b) {
    return a.incidence_.rows() == b.incidence_.rows() && a.incidence_.cols() == b.incidence_.cols() &&
           (a.incidence_ == b.incidence_).all();
  }

 private:
  Incidence incidence_;
  std::vector<std::uint64_t> row_masks_;
  std::vector<std::uint64_t> col_masks_;
  int size_ = 0;
};

/// The triple (m, n, r) of a determinantal matroid M(r, [m] x [n]).
class MatroidContext {
 public:
  /// Throws RegimeError unless 1 <= r < min(m, n).
  MatroidContext(int m, int n, int r);
  static MatroidContext for_pattern(const Pattern& p, int r) { return {p.rows(), p.cols(), r}; }

  int rows() const { return m_; }
  int cols() const { return n_; }
  int rank() const { return r_; }
  /// r(m + n - r), the size of every base.
  int rank_bound() const { return r_ * (m_ + n_ - r_); }
  /// (m - r)(n - r), the height of the ideal of (r+1)-minors.
  int minors_height() const { return (m_ - r_) * (n_ - r_); }
  MatroidContext transposed() const { return {n_, m_, r_}; }
  bool matches(const Pattern& p) const { return p.rows() == m_ && p.cols() == n_; }

  friend bool operator==(const MatroidContext&, const MatroidContext&) = default;

 private:
  int m_;
  int n_;
  int r_;
};

// File format: "m n" header line, then m lines of n characters from {0,1}.
Pattern parse_pattern(std::string_view text);
std::string to_text(const Pattern& p);
Pattern read_pattern_file(const std::filesystem::path& path);
void write_pattern_file(const std::filesystem::path& path, const Pattern& p);

Pattern transpose(const Pattern& p);

/// Cell (i, j) moves to (row_perm[i], col_perm[j]). Throws std::invalid_argument
/// if either map is not a bijection.
Pattern permute(const Pattern& p, const IndexSet& row_perm, const IndexSet& col_perm);

/// Sub-pattern on the given rows and columns, relabelled in the given order.
Pattern restrict_to(const Pattern& p, const IndexSet& rows, const IndexSet& cols);

struct LineReduction {
  Pattern pattern;
  IndexSet kept;     // original indices of surviving lines, increasing
  IndexSet removed;  // original indices of dropped lines, increasing
};

/// Keeps exactly the columns with more than r observed entries.
LineReduction reduce_columns(const Pattern& p, int r);
inline LineReduction reduce_columns(const Pattern& p, const MatroidContext& ctx) {
  return reduce_columns(p, ctx.rank());
}
/// Row analogue of reduce_columns, computed as transpose -> reduce -> transpose.
LineReduction reduce_rows(const Pattern& p, int r);

/// [p 1; 1 1]: appends a full last row and column.
Pattern stitch(const Pattern& p);
/// Inverse of stitch. Throws PreconditionError unless the last row and column are full.
Pattern excise(const Pattern& p);

enum class PathOrder {
  AntiDiagonal,  // (i,j) <= (a,b)  iff  i <= a and j >= b
  Diagonal,      // (i,j) <= (a,b)  iff  i <= a and j <= b
};

bool is_order_convex(const Pattern& p, PathOrder order);
/// Ladder under either of the two path orders.
bool is_ladder(const Pattern& p);

/// Number of observed cells inside rows x cols.
int count_inside(const Pattern& p, const IndexSet& rows, const IndexSet& cols);

IndexSet mask_to_indices(std::uint64_t mask);
std::uint64_t indices_to_mask(const IndexSet& idx);
/// 1-based, comma-separated rendering such as "{1,2,3}".
std::string format_index_set(const IndexSet& idx);

}  // namespace detmat
