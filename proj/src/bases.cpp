#include "detmat/bases.hpp"

#include "detmat/errors.hpp"

#include <algorithm>
#include <random>
#include <utility>

namespace detmat {

namespace {

using Mask = std::uint64_t;

class FamilyWalker {
 public:
  FamilyWalker(int m, int n, int r, std::vector<Mask> allowed, std::size_t limit)
      : m_(m), n_(n), r_(r), allowed_(std::move(allowed)), occupied_(static_cast<std::size_t>(m), 0), limit_(limit) {}

  FamilyEnumeration run() {
    current_.assign(static_cast<std::size_t>(r_), std::string());
    start_path(0);
    return std::move(out_);
  }

 private:
  bool free(int i, int j) const {
    const Mask b = Mask{1} << j;
    return (allowed_[static_cast<std::size_t>(i)] & b) && !(occupied_[static_cast<std::size_t>(i)] & b);
  }
  void toggle(int i, int j) { occupied_[static_cast<std::size_t>(i)] ^= Mask{1} << j; }

  // Returns false once enumeration must stop.
  bool start_path(int k) {
    if (k == r_) {
      if (out_.families.size() >= limit_) {
        out_.truncated = true;
        return false;
      }
      out_.families.push_back({m_, n_, current_});
      return true;
    }
    if (!free(k, n_ - 1)) return true;
    toggle(k, n_ - 1);
    const bool go_on = walk(k, k, n_ - 1);
    toggle(k, n_ - 1);
    return go_on;
  }

  bool walk(int k, int i, int j) {
    if (i == m_ - 1 && j == k) return start_path(k + 1);
    std::string& s = current_[static_cast<std::size_t>(k)];
    if (i < m_ - 1 && free(i + 1, j)) {
      toggle(i + 1, j);
      s.push_back('D');
      const bool go_on = walk(k, i + 1, j);
      s.pop_back();
      toggle(i + 1, j);
      if (!go_on) return false;
    }
    if (j > k && free(i, j - 1)) {
      toggle(i, j - 1);
      s.push_back('L');
      const bool go_on = walk(k, i, j - 1);
      s.pop_back();
      toggle(i, j - 1);
      if (!go_on) return false;
    }
    return true;
  }

  int m_;
  int n_;
  int r_;
  std::vector<Mask> allowed_;
  std::vector<Mask> occupied_;
  std::size_t limit_;
  std::vector<std::string> current_;
  FamilyEnumeration out_;
};

std::vector<Mask> all_cells(int m, int n) {
  const Mask row = n == 64 ? ~Mask{0} : (Mask{1} << n) - 1;
  return std::vector<Mask>(static_cast<std::size_t>(m), row);
}

// Path k: along row k to column k, then down column k.
PathFamily hook_family(const MatroidContext& ctx) {
  PathFamily f{ctx.rows(), ctx.cols(), {}};
  for (int k = 0; k < ctx.rank(); ++k) {
    f.paths.push_back(std::string(static_cast<std::size_t>(ctx.cols() - 1 - k), 'L') +
                      std::string(static_cast<std::size_t>(ctx.rows() - 1 - k), 'D'));
  }
  return f;
}

}  // namespace

std::vector<Cell> path_cells(const PathFamily& f, int k) {
  if (k < 0 || k >= f.rank()) throw std::out_of_range("path index out of range");
  std::vector<Cell> out{{k, f.cols - 1}};
  for (char c : f.paths[static_cast<std::size_t>(k)]) {
    Cell next = out.back();
    if (c == 'D') {
      ++next.row;
    } else if (c == 'L') {
      --next.col;
    } else {
      throw PreconditionError(std::string("path step must be 'D' or 'L', got '") + c + "'");
    }
    out.push_back(next);
  }
  return out;
}

void validate_family(const PathFamily& f) {
  const int r = f.rank();
  if (f.rows < 2 || f.cols < 2 || f.rows > kMaxDimension || f.cols > kMaxDimension || r < 1 ||
      r >= std::min(f.rows, f.cols)) {
    throw PreconditionError("path family needs 1 <= r < min(m, n)");
  }
  Incidence seen = Incidence::Constant(f.rows, f.cols, false);
  for (int k = 0; k < r; ++k) {
    const std::string& s = f.paths[static_cast<std::size_t>(k)];
    const auto downs = std::count(s.begin(), s.end(), 'D');
    const auto lefts = std::count(s.begin(), s.end(), 'L');
    if (downs != f.rows - 1 - k || lefts != f.cols - 1 - k || downs + lefts != static_cast<long>(s.size())) {
      throw PreconditionError("path " + std::to_string(k + 1) + " does not run from (" + std::to_string(k + 1) +
                              "," + std::to_string(f.cols) + ") to (" + std::to_string(f.rows) + "," +
                              std::to_string(k + 1) + ")");
    }
    for (const Cell& c : path_cells(f, k)) {
      if (seen(c.row, c.col)) throw PreconditionError("paths intersect at (" + std::to_string(c.row + 1) + "," +
                                                      std::to_string(c.col + 1) + ")");
      seen(c.row, c.col) = true;
    }
  }
}

FamilyEnumeration enumerate_families(const MatroidContext& ctx, std::size_t limit) {
  return FamilyWalker(ctx.rows(), ctx.cols(), ctx.rank(), all_cells(ctx.rows(), ctx.cols()), limit).run();
}

PathFamily sample_family(const MatroidContext& ctx, std::uint64_t seed, std::size_t exact_limit) {
  std::mt19937_64 rng(seed);
  FamilyEnumeration all = enumerate_families(ctx, exact_limit);
  if (!all.truncated) {
    std::uniform_int_distribution<std::size_t> pick(0, all.families.size() - 1);
    return all.families[pick(rng)];
  }
  const int m = ctx.rows();
  const int n = ctx.cols();
  constexpr int kFamilyAttempts = 1'000;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < kFamilyAttempts; ++attempt) {
    PathFamily f{m, n, std::vector<std::string>(static_cast<std::size_t>(ctx.rank()))};
    Incidence used = Incidence::Constant(m, n, false);
    bool ok = true;
    // Innermost path first; each path is uniform among those avoiding the cells already used.
    for (int k = ctx.rank() - 1; k >= 0 && ok; --k) {
      Eigen::ArrayXXd ways = Eigen::ArrayXXd::Zero(m, n);
      for (int i = m - 1; i >= k; --i) {
        for (int j = k; j < n; ++j) {
          if (used(i, j)) continue;
          if (i == m - 1 && j == k) {
            ways(i, j) = 1.0;
            continue;
          }
          ways(i, j) = (i + 1 < m ? ways(i + 1, j) : 0.0) + (j > k ? ways(i, j - 1) : 0.0);
        }
      }
      if (ways(k, n - 1) == 0.0) {
        ok = false;
        break;
      }
      std::string steps;
      int i = k;
      int j = n - 1;
      used(i, j) = true;
      while (i != m - 1 || j != k) {
        const double down = i + 1 < m ? ways(i + 1, j) : 0.0;
        const double left = j > k ? ways(i, j - 1) : 0.0;
        if (unit(rng) * (down + left) < down) {
          ++i;
          steps.push_back('D');
        } else {
          --j;
          steps.push_back('L');
        }
        used(i, j) = true;
      }
      f.paths[static_cast<std::size_t>(k)] = std::move(steps);
    }
    if (ok) return f;
  }
  return hook_family(ctx);
}

Pattern family_to_pattern(const PathFamily& f) {
  Incidence inc = Incidence::Constant(f.rows, f.cols, false);
  for (int k = 0; k < f.rank(); ++k)
    for (const Cell& c : path_cells(f, k)) inc(c.row, c.col) = true;
  return Pattern(std::move(inc));
}

Pattern diagonal_variant(const PathFamily& f) {
  const Pattern p = family_to_pattern(f);
  IndexSet rows(static_cast<std::size_t>(f.rows));
  IndexSet cols(static_cast<std::size_t>(f.cols));
  for (int i = 0; i < f.rows; ++i) rows[static_cast<std::size_t>(i)] = i;
  for (int j = 0; j < f.cols; ++j) cols[static_cast<std::size_t>(j)] = f.cols - 1 - j;
  return permute(p, rows, cols);
}

std::optional<PathFamily> family_from_pattern(const Pattern& p, int r) {
  if (r < 1 || r >= std::min(p.rows(), p.cols()) || p.size() != r * (p.rows() + p.cols() - r)) return std::nullopt;
  std::vector<Mask> allowed(static_cast<std::size_t>(p.rows()));
  for (int i = 0; i < p.rows(); ++i) allowed[static_cast<std::size_t>(i)] = p.row_mask(i);
  FamilyEnumeration found = FamilyWalker(p.rows(), p.cols(), r, std::move(allowed), 1).run();
  if (found.families.empty()) return std::nullopt;
  return found.families.front();
}

bool ladder_unique_check(const PathFamily& f) { return is_ladder(family_to_pattern(f)); }

}  // namespace detmat
