#pragma once

#include "detmat/criteria.hpp"
#include "detmat/oracle.hpp"
#include "detmat/pattern.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace detmat {

struct ClosureStep {
  Cell cell;
  /// r x r all-known witness; with row cell.row and column cell.col it forms an (r+1)-minor
  /// whose only unknown entry was `cell`.
  IndexSet rows;
  IndexSet cols;
};

struct ClosureTrace {
  std::vector<ClosureStep> order;
  std::vector<Cell> residual;
  bool complete() const { return residual.empty(); }
};

/// Fixed point of "an unknown cell becomes known when some (r+1)-minor through it has every
/// other entry known". Witnesses are found by exact branch and bound over row subsets.
/// Unknown cells are scanned row-major on each pass, so the trace is deterministic.
ClosureTrace greedy_closure(const Pattern& p, const MatroidContext& ctx);

struct LineDrop {
  bool is_row = false;
  int index = 0;  // in the original pattern
};

struct UniqueReduction {
  Pattern pattern{1, 1};
  int rank = 1;
  IndexSet kept_rows;  // original indices, increasing
  IndexSet kept_cols;
  std::vector<LineDrop> dropped;
  /// A line of the reduced pattern with fewer than r entries: not finitely completable.
  std::optional<LineDrop> short_line;
  /// A line with exactly r entries was kept because dropping it would leave only r lines.
  bool stopped_at_boundary = false;
};

/// Drops columns, then rows, with exactly r entries until none remains or a short line shows
/// up. Base-ness, finite and unique completability are all preserved.
UniqueReduction column_reduce_unique(const Pattern& p, const MatroidContext& ctx);

enum class CompletionStatus { NotFinitelyCompletable, FinitelyCompletable, UniquelyCompletable, Unknown };
enum class Uniqueness { Unique, NotUnique, Undetermined };
enum class Confidence { Proved, Probabilistic };

std::string to_string(CompletionStatus s);
std::string to_string(Uniqueness u);
std::string to_string(Confidence c);

struct Evidence {
  std::string rule;
  std::vector<std::pair<std::string, std::string>> params;
};

struct CompletabilityVerdict {
  CompletionStatus status = CompletionStatus::Unknown;
  /// Confidence in `status`.
  Confidence confidence = Confidence::Proved;
  /// Settled independently of status: a finitely completable pattern may be known not to be
  /// uniquely completable.
  Uniqueness uniqueness = Uniqueness::Undetermined;
  Confidence uniqueness_confidence = Confidence::Proved;
  std::optional<bool> is_base;
  std::vector<Evidence> evidence;

  std::optional<DependenceCertificate> certificate;
  std::optional<ClosureTrace> closure;
  std::optional<OracleVerdict> oracle;
  std::optional<FiberCountResult> fiber;

  bool finitely_completable() const {
    return status == CompletionStatus::FinitelyCompletable || status == CompletionStatus::UniquelyCompletable;
  }
};

/// Rank 1: uniquely completable iff every line is nonempty and the bipartite graph of p is
/// connected. Throws RegimeError when min(m, n) < 2.
CompletabilityVerdict unique_r1(const Pattern& p);
/// Rank min(m, n) - 1: with m <= n, uniquely completable iff every column has at least m - 1
/// entries and m - 1 columns are full. Throws RegimeError when min(m, n) < 2.
CompletabilityVerdict unique_corank1(const Pattern& p);
/// Square, rank m - 2, p a base: uniquely completable unless the four zeros sit in four
/// distinct rows and columns. Throws RegimeError off that regime, PreconditionError if p is
/// not a base.
CompletabilityVerdict unique_corank2_square(const Pattern& p);

struct PipelineOptions {
  OracleOptions oracle;
  FiberOptions fiber;
  AscheSearchOptions asche;
  std::uint64_t partition_budget = 2'000'000;
  /// Fiber statistics run only when uniqueness is still undetermined, unless this is set.
  bool fiber_when_proved = false;
  bool run_fiber = true;
  double unique_threshold = 0.95;
  double not_unique_threshold = 0.30;
  /// Corank-2 squares: contained bases are enumerated when there are at most this many.
  std::uint64_t contained_base_limit = 100'000;
};

CompletabilityVerdict verdict_pipeline(const Pattern& p, const MatroidContext& ctx, const PipelineOptions& opts = {});

struct RankDescentReport {
  /// The verdict at r was Proved UniquelyCompletable.
  bool applicable = false;
  int lower_rank = 0;
  std::optional<FiberCountResult> fiber;
  /// Fraction of count-1 trials at the lower rank met the threshold (true when inapplicable).
  bool holds = true;
};

/// Checks that a Proved unique verdict at ctx.rank() shows fiber count 1 at lower_rank.
/// Throws std::invalid_argument unless 1 <= lower_rank <= ctx.rank().
RankDescentReport rank_descent_check(const Pattern& p, const MatroidContext& ctx, int lower_rank,
                                     const PipelineOptions& opts = {});

}  // namespace detmat
