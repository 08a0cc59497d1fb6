// Independent reference implementations shared by the unit, property and acceptance tests.
// Nothing here calls into the library's arithmetic or search code.
#pragma once

#include "detmat/bases.hpp"
#include "detmat/completability.hpp"
#include "detmat/criteria.hpp"
#include "detmat/oracle.hpp"
#include "detmat/pattern.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#ifndef DETMAT_FIXTURE_DIR
#define DETMAT_FIXTURE_DIR "fixtures"
#endif

namespace testsupport {

using detmat::Cell;
using detmat::IndexSet;
using detmat::MatroidContext;
using detmat::Pattern;

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(DETMAT_FIXTURE_DIR) / name; }

inline Pattern load(const std::string& name) { return detmat::read_pattern_file(fixture(name)); }

using Mat = std::vector<std::vector<std::int64_t>>;

inline std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t q) { return a * b % q; }

inline std::int64_t powmod(std::int64_t a, std::int64_t e, std::int64_t q) {
  std::int64_t r = 1;
  a %= q;
  while (e > 0) {
    if (e & 1) r = mulmod(r, a, q);
    a = mulmod(a, a, q);
    e >>= 1;
  }
  return r;
}

/// Plain Gaussian elimination mod q (q < 2^31 so products fit in int64).
inline int rank_mod(Mat a, std::int64_t q) {
  const int rows = static_cast<int>(a.size());
  const int cols = rows ? static_cast<int>(a[0].size()) : 0;
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int piv = -1;
    for (int i = rank; i < rows; ++i)
      if (a[i][c] % q != 0) piv = i;
    if (piv < 0) continue;
    std::swap(a[piv], a[rank]);
    const std::int64_t inv = powmod(a[rank][c], q - 2, q);
    for (int i = 0; i < rows; ++i) {
      if (i == rank || a[i][c] == 0) continue;
      const std::int64_t f = mulmod(a[i][c], inv, q);
      for (int k = c; k < cols; ++k) a[i][k] = ((a[i][k] - mulmod(f, a[rank][k], q)) % q + q) % q;
    }
    ++rank;
  }
  return rank;
}

inline constexpr std::int64_t kRefPrime = 2'147'483'647;  // 2^31 - 1

/// Jacobian rank of (A, B) -> (AB)_Omega at `points` random points mod 2^31 - 1.
inline int reference_rank(const Pattern& p, int r, std::uint64_t seed, int points = 3) {
  const int m = p.rows();
  const int n = p.cols();
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<std::int64_t> dist(0, kRefPrime - 1);
  int best = 0;
  for (int t = 0; t < points; ++t) {
    Mat a(m, std::vector<std::int64_t>(r));
    Mat b(r, std::vector<std::int64_t>(n));
    for (auto& row : a)
      for (auto& x : row) x = dist(rng);
    for (auto& row : b)
      for (auto& x : row) x = dist(rng);
    Mat jac;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        if (!p(i, j)) continue;
        std::vector<std::int64_t> row(static_cast<std::size_t>((m + n) * r), 0);
        for (int k = 0; k < r; ++k) {
          row[static_cast<std::size_t>(i * r + k)] = b[k][j];
          row[static_cast<std::size_t>(m * r + j * r + k)] = a[i][k];
        }
        jac.push_back(std::move(row));
      }
    }
    best = std::max(best, rank_mod(jac, kRefPrime));
  }
  return best;
}

/// Counts rank <= r completions of x|_Omega by trying all q^u fillings of the unknowns.
inline std::uint64_t naive_fiber(const Pattern& p, int r, const Mat& x, std::int64_t q) {
  std::vector<Cell> unknown = p.missing_cells();
  Mat y = x;
  std::uint64_t count = 0;
  std::vector<std::int64_t> digits(unknown.size(), 0);
  while (true) {
    for (std::size_t k = 0; k < unknown.size(); ++k) y[unknown[k].row][unknown[k].col] = digits[k];
    if (rank_mod(y, q) <= r) ++count;
    std::size_t k = 0;
    while (k < digits.size() && ++digits[k] == q) digits[k++] = 0;
    if (k == digits.size()) break;
  }
  return count;
}

/// Random rank-r matrix mod q as a product of uniform factors.
inline Mat random_low_rank(int m, int n, int r, std::int64_t q, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> dist(0, q - 1);
  Mat a(m, std::vector<std::int64_t>(r));
  Mat b(r, std::vector<std::int64_t>(n));
  for (auto& row : a)
    for (auto& v : row) v = dist(rng);
  for (auto& row : b)
    for (auto& v : row) v = dist(rng);
  Mat x(m, std::vector<std::int64_t>(n, 0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < r; ++k) x[i][j] = (x[i][j] + a[i][k] * b[k][j]) % q;
  return x;
}

/// Every r-tuple of individually valid anti-diagonal paths, kept when pairwise disjoint.
inline std::vector<std::vector<std::string>> brute_families(int m, int n, int r) {
  std::vector<std::vector<std::string>> per_index(static_cast<std::size_t>(r));
  for (int k = 0; k < r; ++k) {
    std::string s(static_cast<std::size_t>(m - 1 - k), 'D');
    s += std::string(static_cast<std::size_t>(n - 1 - k), 'L');
    std::sort(s.begin(), s.end());
    do per_index[static_cast<std::size_t>(k)].push_back(s);
    while (std::next_permutation(s.begin(), s.end()));
  }
  auto cells_of = [&](int k, const std::string& s) {
    std::vector<int> out{k * n + (n - 1)};
    int i = k;
    int j = n - 1;
    for (char c : s) {
      if (c == 'D') ++i;
      else --j;
      out.push_back(i * n + j);
    }
    return out;
  };
  std::vector<std::vector<std::string>> result;
  std::vector<std::size_t> pick(static_cast<std::size_t>(r), 0);
  while (true) {
    std::vector<bool> used(static_cast<std::size_t>(m * n), false);
    bool ok = true;
    for (int k = 0; k < r && ok; ++k) {
      for (int c : cells_of(k, per_index[k][pick[k]])) {
        if (used[static_cast<std::size_t>(c)]) ok = false;
        used[static_cast<std::size_t>(c)] = true;
      }
    }
    if (ok) {
      std::vector<std::string> fam;
      for (int k = 0; k < r; ++k) fam.push_back(per_index[k][pick[k]]);
      result.push_back(fam);
    }
    int k = r - 1;
    while (k >= 0 && ++pick[k] == per_index[k].size()) pick[k--] = 0;
    if (k < 0) break;
  }
  std::sort(result.begin(), result.end());
  return result;
}

/// Column-excess inequality over every row subset with more than r rows, written out directly.
inline bool hand_slmf(const Pattern& p, int nu, int r) {
  const int m = p.rows();
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    const int size = std::popcount(mask);
    if (size <= r) continue;
    int lhs = 0;
    for (int j = 0; j < p.cols(); ++j) {
      int c = 0;
      for (int i = 0; i < m; ++i)
        if ((mask >> i & 1u) && p(i, j)) ++c;
      lhs += std::max(c - r, 0);
    }
    const int rhs = nu * (size - r);
    if (lhs > rhs) return false;
    if (size == m && lhs != rhs) return false;
  }
  return true;
}

inline Pattern random_pattern(int m, int n, int size, std::mt19937_64& rng) {
  std::vector<int> idx(static_cast<std::size_t>(m * n));
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  Pattern p(m, n);
  detmat::Incidence inc = detmat::Incidence::Constant(m, n, false);
  for (int k = 0; k < size; ++k) inc(idx[k] / n, idx[k] % n) = true;
  return Pattern(inc);
}

inline Pattern random_density(int m, int n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(density);
  detmat::Incidence inc(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) inc(i, j) = coin(rng);
  return Pattern(inc);
}

inline Pattern from_mask(int m, int n, std::uint64_t mask) {
  detmat::Incidence inc(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) inc(i, j) = (mask >> (i * n + j)) & 1u;
  return Pattern(inc);
}

inline IndexSet random_perm(int n, std::mt19937_64& rng) {
  IndexSet v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  std::shuffle(v.begin(), v.end(), rng);
  return v;
}

/// Smallest row-major bitmask over all row/column permutations (and the transpose when square).
inline std::uint64_t canonical_mask(const Pattern& p) {
  const int m = p.rows();
  const int n = p.cols();
  std::uint64_t best = ~std::uint64_t{0};
  auto scan = [&](const Pattern& q) {
    IndexSet rp(static_cast<std::size_t>(m));
    std::iota(rp.begin(), rp.end(), 0);
    do {
      IndexSet cp(static_cast<std::size_t>(n));
      std::iota(cp.begin(), cp.end(), 0);
      do {
        std::uint64_t mask = 0;
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < n; ++j)
            if (q(i, j)) mask |= std::uint64_t{1} << (rp[i] * n + cp[j]);
        best = std::min(best, mask);
      } while (std::next_permutation(cp.begin(), cp.end()));
    } while (std::next_permutation(rp.begin(), rp.end()));
  };
  scan(p);
  if (m == n) scan(detmat::transpose(p));
  return best;
}

struct PropertyTally {
  int instances = 0;
  int violations = 0;
  std::string first_violation;
  void check(bool ok, const std::string& what) {
    ++instances;
    if (!ok) {
      if (violations == 0) first_violation = what;
      ++violations;
    }
  }
};

inline detmat::OracleOptions seeded(std::uint64_t seed) {
  detmat::OracleOptions o;
  o.seed = seed;
  return o;
}

/// rank(S) <= rank(S + e) <= rank(S) + 1.
inline PropertyTally monotonicity_suite(int count, std::uint64_t seed) {
  PropertyTally t;
  std::mt19937_64 rng(seed);
  for (int k = 0; k < count; ++k) {
    const int m = 3 + static_cast<int>(rng() % 4);
    const int n = 3 + static_cast<int>(rng() % 4);
    const int r = 1 + static_cast<int>(rng() % (std::min(m, n) - 1));
    const MatroidContext ctx(m, n, r);
    const Pattern p = random_density(m, n, 0.5, rng);
    const auto missing = p.missing_cells();
    if (missing.empty()) continue;
    const Cell e = missing[rng() % missing.size()];
    const int a = detmat::matroid_rank(p, ctx, seeded(seed + k)).rank_estimate;
    const int b = detmat::matroid_rank(p.with(e), ctx, seeded(seed + k)).rank_estimate;
    t.check(a <= b && b <= a + 1 && a <= std::min(p.size(), ctx.rank_bound()),
            "monotonicity " + detmat::to_text(p));
  }
  return t;
}

/// For independent I, J with |I| < |J| some e in J \ I keeps I + e independent.
inline PropertyTally exchange_suite(int count, std::uint64_t seed) {
  PropertyTally t;
  std::mt19937_64 rng(seed);
  int attempts = 0;
  while (t.instances < count && attempts < 50 * count) {
    ++attempts;
    const int m = 3 + static_cast<int>(rng() % 3);
    const int n = 3 + static_cast<int>(rng() % 3);
    const int r = 1 + static_cast<int>(rng() % (std::min(m, n) - 1));
    const MatroidContext ctx(m, n, r);
    const int bound = ctx.rank_bound();
    const int js = 2 + static_cast<int>(rng() % static_cast<unsigned>(bound - 1));
    const int is = 1 + static_cast<int>(rng() % static_cast<unsigned>(js - 1));
    const Pattern big = random_pattern(m, n, js, rng);
    const Pattern small = random_pattern(m, n, is, rng);
    const auto opts = seeded(seed + static_cast<std::uint64_t>(attempts));
    if (!detmat::is_independent(big, ctx, opts) || !detmat::is_independent(small, ctx, opts)) continue;
    bool found = false;
    for (const Cell& e : big.cells()) {
      if (small.contains(e)) continue;
      if (detmat::is_independent(small.with(e), ctx, opts)) {
        found = true;
        break;
      }
    }
    t.check(found, "exchange " + detmat::to_text(small) + " / " + detmat::to_text(big));
  }
  return t;
}

/// Rank is unchanged by row/column permutations and by transposition.
inline PropertyTally invariance_suite(int count, std::uint64_t seed) {
  PropertyTally t;
  std::mt19937_64 rng(seed);
  for (int k = 0; k < count; ++k) {
    const int m = 3 + static_cast<int>(rng() % 4);
    const int n = 3 + static_cast<int>(rng() % 4);
    const int r = 1 + static_cast<int>(rng() % (std::min(m, n) - 1));
    const MatroidContext ctx(m, n, r);
    const Pattern p = random_density(m, n, 0.4 + 0.4 * (rng() % 2), rng);
    const auto opts = seeded(seed + k);
    const int base = detmat::matroid_rank(p, ctx, opts).rank_estimate;
    const Pattern q = detmat::permute(p, random_perm(m, rng), random_perm(n, rng));
    const int permuted = detmat::matroid_rank(q, ctx, opts).rank_estimate;
    const int transposed = detmat::matroid_rank(detmat::transpose(p), ctx.transposed(), opts).rank_estimate;
    t.check(base == permuted && base == transposed, "invariance " + detmat::to_text(p));
  }
  return t;
}

/// Every certificate the library emits is arithmetically correct and names a dependent set.
inline PropertyTally certificate_suite(int count, std::uint64_t seed) {
  PropertyTally t;
  std::mt19937_64 rng(seed);
  for (int k = 0; k < count; ++k) {
    const int m = 3 + static_cast<int>(rng() % 5);
    const int n = 3 + static_cast<int>(rng() % 5);
    const int r = 1 + static_cast<int>(rng() % (std::min(m, n) - 1));
    const MatroidContext ctx(m, n, r);
    const int lo = std::max(1, ctx.rank_bound() - 4);
    const int size = std::min(m * n, lo + static_cast<int>(rng() % 8));
    const Pattern p = random_pattern(m, n, size, rng);
    std::vector<detmat::DependenceCertificate> certs;
    if (auto c = detmat::block_dependence_scan(p, ctx)) certs.push_back(*c);
    detmat::AscheSearchOptions ao;
    ao.node_budget = 20'000;
    if (auto c = detmat::asche_search(p, ctx, ao)) certs.push_back(*c);
    if (auto cf = detmat::closed_form(p, ctx); cf && cf->certificate) certs.push_back(*cf->certificate);
    if (certs.empty()) continue;
    const bool dependent = reference_rank(p, r, seed + k) < p.size();
    for (const auto& c : certs) {
      int missing = 0;
      bool listed = true;
      for (const Cell& cell : c.support.cells()) {
        if (!p.contains(cell)) ++missing;
      }
      for (const Cell& cell : c.missing) listed = listed && c.support.contains(cell) && !p.contains(cell);
      int height = c.height;
      if (c.kind == detmat::CertificateKind::Asche) {
        height = 0;
        for (const auto& b : c.family.blocks) height += detmat::rectangle_height(b, r);
      } else if (c.kind == detmat::CertificateKind::Block && c.family.blocks.size() == 1) {
        height = detmat::rectangle_height(c.family.blocks[0], r);
      }
      const bool arithmetic = listed && missing == static_cast<int>(c.missing.size()) && height == c.height &&
                              c.deficit == c.height - missing && c.deficit >= 1;
      t.check(dependent && arithmetic, detmat::to_string(c.kind) + " certificate on " + detmat::to_text(p));
    }
  }
  return t;
}

}  // namespace testsupport
