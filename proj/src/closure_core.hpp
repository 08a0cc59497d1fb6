#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace detmat::detail {

using Mask = std::uint64_t;

// Finds R (|R| = r) inside row_candidates and C (|C| = r) inside col_candidates with R x C
// known, by exact depth-first search over rows in increasing order.
class WitnessSearch {
 public:
  WitnessSearch(const std::vector<Mask>& known_rows, int r) : known_rows_(known_rows), r_(r) {}

  bool find(Mask row_candidates, Mask col_candidates, Mask& rows, Mask& cols) const {
    rows = 0;
    if (std::popcount(row_candidates) < r_ || std::popcount(col_candidates) < r_) return false;
    return dfs(row_candidates, r_, col_candidates, rows, cols);
  }

 private:
  static Mask lowest_bits(Mask x, int k) {
    Mask out = 0;
    for (; k > 0 && x != 0; --k) {
      out |= x & (~x + 1);
      x &= x - 1;
    }
    return out;
  }

  bool dfs(Mask left, int need, Mask cols, Mask& chosen, Mask& out) const {
    if (need == 0) {
      out = lowest_bits(cols, r_);
      return true;
    }
    while (left != 0 && std::popcount(left) >= need) {
      const int a = std::countr_zero(left);
      left &= left - 1;
      const Mask next = cols & known_rows_[static_cast<std::size_t>(a)];
      if (std::popcount(next) < r_) continue;
      chosen |= Mask{1} << a;
      if (dfs(left, need - 1, next, chosen, out)) return true;
      chosen &= ~(Mask{1} << a);
    }
    return false;
  }

  const std::vector<Mask>& known_rows_;
  int r_;
};

struct RawStep {
  int row;
  int col;
  Mask witness_rows;
  Mask witness_cols;
};

// Greedy closure on per-row and per-column known masks, updated in place. Unknown cells are
// scanned row-major on every pass.
inline std::vector<RawStep> close_masks(std::vector<Mask>& known_rows, std::vector<Mask>& known_cols, int n, int r) {
  const WitnessSearch search(known_rows, r);
  const Mask full = n == 64 ? ~Mask{0} : (Mask{1} << n) - 1;
  std::vector<RawStep> steps;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < known_rows.size(); ++i) {
      for (Mask unknown = ~known_rows[i] & full; unknown != 0; unknown &= unknown - 1) {
        const int j = std::countr_zero(unknown);
        const Mask row_cand = known_cols[static_cast<std::size_t>(j)] & ~(Mask{1} << i);
        const Mask col_cand = known_rows[i] & ~(Mask{1} << j);
        Mask rows = 0;
        Mask cols = 0;
        if (!search.find(row_cand, col_cand, rows, cols)) continue;
        known_rows[i] |= Mask{1} << j;
        known_cols[static_cast<std::size_t>(j)] |= Mask{1} << i;
        steps.push_back({static_cast<int>(i), j, rows, cols});
        changed = true;
      }
    }
  }
  return steps;
}

}  // namespace detmat::detail
