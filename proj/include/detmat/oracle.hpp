#pragma once

#include "detmat/pattern.hpp"
#include "detmat/prime_field.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>

namespace detmat {

inline constexpr std::uint64_t kDefaultSeed = 271828;
inline constexpr std::uint64_t kDefaultFiberBudget = std::uint64_t{1} << 24;

struct OracleOptions {
  std::uint64_t seed = kDefaultSeed;
  /// Random points on the primary prime.
  int trials = 3;
  /// Confirmation points on the secondary prime, spent only when the rank looks deficient.
  int extra_prime_trials = 1;
  std::uint64_t primary_prime = kDefaultPrime;
  std::uint64_t secondary_prime = kSecondPrime;
};

/// Independent generator for (seed, stream, index); every random point owns one.
std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

struct OracleVerdict {
  int rank_estimate = 0;
  /// Random points actually evaluated, across both primes.
  int trials = 0;
  /// The estimate never exceeds the true rank.
  bool is_exact_lower_bound = true;
  /// Upper bound on P(rank_estimate < true rank).
  double failure_bound = 0.0;
  std::string failure_note;
};

/// Row for (i, j) holds B(k, j) in column i*r + k and A(i, k) in column m*r + k*n + j,
/// i.e. the differential of x_ij = sum_k A(i,k) B(k,j). Rows follow p.cells() order.
FFMatrix jacobian_matrix(const Pattern& p, const MatroidContext& ctx, const FFMatrix& a, const FFMatrix& b,
                         const PrimeField& field);

/// Max Jacobian rank over random points. Throws std::invalid_argument if opts.trials < 1.
OracleVerdict matroid_rank(const Pattern& p, const MatroidContext& ctx, const OracleOptions& opts = {});
bool is_independent(const Pattern& p, const MatroidContext& ctx, const OracleOptions& opts = {});
bool is_base(const Pattern& p, const MatroidContext& ctx, const OracleOptions& opts = {});

/// Greedy single-cell removal down to a minimal dependent subset.
/// Throws PreconditionError when p tests independent.
Pattern find_circuit(const Pattern& p, const MatroidContext& ctx, const OracleOptions& opts = {});

/// Cells whose addition leaves the rank unchanged (includes p itself).
Pattern matroid_closure(const Pattern& p, const MatroidContext& ctx, const OracleOptions& opts = {});

struct FiberOptions {
  std::uint64_t q = 11;
  int trials = 100;
  std::uint64_t seed = kDefaultSeed;
  /// Search nodes allowed per trial before BudgetExceeded.
  std::uint64_t node_budget = kDefaultFiberBudget;
  /// Resample (A, B) until the Jacobian of the observed entries reaches the generic rank, so
  /// every sample lies where the coordinate projection is unramified.
  bool regular_points_only = true;
  /// Cap on rejected samples per accepted trial before BudgetExceeded.
  int max_rejections_per_trial = 200;
};

struct FiberCountResult {
  std::uint64_t q = 0;
  int trials = 0;
  /// completion count -> number of trials with that count
  std::map<std::uint64_t, int> counts;
  int unknowns = 0;
  /// Samples discarded as irregular.
  int rejected = 0;
  /// Generic Jacobian rank the accepted samples matched (-1 when unfiltered).
  int generic_rank = -1;
  /// q < 7: small fields are far from generic.
  bool low_confidence = false;
  std::uint64_t nodes = 0;

  int trials_with(std::uint64_t count) const;
  double fraction_with(std::uint64_t count) const;
  double fraction_not(std::uint64_t count) const { return 1.0 - fraction_with(count); }
};

/// For each trial, samples X = A B over Z/q and counts every completion of X restricted to p
/// having rank <= r. Throws std::invalid_argument if q is not prime, BudgetExceeded past the
/// per-trial node budget.
FiberCountResult fiber_count(const Pattern& p, const MatroidContext& ctx, const FiberOptions& opts = {});

/// Number of rank <= r completions of the observed entries of x (cells outside p are ignored).
std::uint64_t count_completions(const Pattern& p, int r, const FFMatrix& x, const PrimeField& field,
                                std::uint64_t node_budget, std::uint64_t* nodes_used = nullptr);

}  // namespace detmat
