#pragma once

#include "detmat/pattern.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace detmat {

/// r non-intersecting anti-diagonal lattice paths in an m x n grid. Path k (zero-based) starts
/// at (k, n-1), ends at (m-1, k), and is stored as a string over {'D', 'L'} (down, left) with
/// m-1-k of each 'D' and n-1-k of each 'L'.
struct PathFamily {
  int rows = 0;
  int cols = 0;
  std::vector<std::string> paths;

  int rank() const { return static_cast<int>(paths.size()); }
  friend bool operator==(const PathFamily&, const PathFamily&) = default;
};

/// Cells of path k in walking order.
std::vector<Cell> path_cells(const PathFamily& f, int k);

/// Throws PreconditionError for bad dimensions, malformed step strings, or intersecting paths.
void validate_family(const PathFamily& f);

struct FamilyEnumeration {
  std::vector<PathFamily> families;
  bool truncated = false;
};

/// All families for ctx in lexicographic order of the step strings ('D' < 'L'), path 0 first.
FamilyEnumeration enumerate_families(const MatroidContext& ctx, std::size_t limit = 1'000'000);

/// Uniform over all families when there are at most `exact_limit`. Otherwise paths are drawn
/// innermost first, each uniform among the paths avoiding those already placed, restarting when
/// no path fits. Deterministic in seed.
PathFamily sample_family(const MatroidContext& ctx, std::uint64_t seed, std::size_t exact_limit = 10'000);

Pattern family_to_pattern(const PathFamily& f);
/// Column reversal j -> n-1-j of the family pattern: a diagonal-path base.
Pattern diagonal_variant(const PathFamily& f);

/// Decomposes p into r anti-diagonal paths, if possible.
std::optional<PathFamily> family_from_pattern(const Pattern& p, int r);

/// True iff the family pattern is a ladder.
bool ladder_unique_check(const PathFamily& f);

}  // namespace detmat
