#pragma once

#include "detmat/pattern.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace detmat {

/// Exhaustive row-subset enumeration is limited to this many rows.
inline constexpr int kMaxSlmfRows = 20;

struct SlmfParams {
  int nu = 1;
  int r = 1;
  int m = 2;
};

struct SlmfResult {
  bool holds = false;
  /// First row subset (in increasing mask order) where the condition fails.
  std::optional<IndexSet> violation;
  int lhs = 0;
  int rhs = 0;
};

/// Evaluates, for every I with |I| > r,
///   sum_j max(|Omega ∩ (I x {j})| - r, 0) <= nu (|I| - r),
/// with equality required at I = [m]. Throws RegimeError on bad parameters, on a row-count
/// mismatch, or when m exceeds kMaxSlmfRows.
SlmfResult slmf_evaluate(const Pattern& p, const SlmfParams& params);
inline bool slmf_check(const Pattern& p, const SlmfParams& params) { return slmf_evaluate(p, params).holds; }

/// Necessary condition for a base (nu = r); false certifies "not a base".
bool slmf_necessary_check(const Pattern& p, const MatroidContext& ctx);

/// Column partition into r groups, each a relaxed (1, r, m)-SLMF, found by exhaustive
/// backtracking. A hit proves p is a base. nullopt if |p| != r(m+n-r), no partition exists,
/// or the node budget runs out (budget_exhausted is then set).
std::optional<std::vector<IndexSet>> partition_slmf_search(const Pattern& p, const MatroidContext& ctx,
                                                           std::uint64_t node_budget = 50'000'000,
                                                           bool* budget_exhausted = nullptr);

struct Rectangle {
  IndexSet rows;
  IndexSet cols;
  friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

/// Ordered rectangles backing a dependence certificate.
struct BlockFamily {
  std::vector<Rectangle> blocks;
};

enum class CertificateKind { Block, Asche, Height, ClosedForm };
std::string to_string(CertificateKind kind);

/// A proof that p is dependent: the inequality height > |T \ Omega| holds for the stated
/// height. For Block and ClosedForm the height is that of a single rectangle, for Asche it is
/// the block sum of the family, for Height it is caller-supplied.
struct DependenceCertificate {
  CertificateKind kind = CertificateKind::Block;
  BlockFamily family;
  Pattern support{1, 1};      // T
  std::vector<Cell> missing;  // T \ Omega
  int height = 0;
  int deficit = 0;            // height - |T \ Omega|, at least 1
  std::string inequality;     // the inequality instantiated with numbers
};

/// (|I| - r)(|J| - r), the height of the ideal of (r+1)-minors of an I x J block.
int rectangle_height(const Rectangle& rect, int r);

/// Searches rectangles for |Omega ∩ (I x J)| > r(|I| + |J| - r). Row subsets of the smaller
/// side are enumerated exhaustively when that side has at most `cap` lines (the best column
/// set for a fixed row set is then exact); larger patterns use a local search.
/// Returns the rectangle of largest overflow.
std::optional<DependenceCertificate> block_dependence_scan(const Pattern& p, const MatroidContext& ctx,
                                                           int cap = 16);

/// True iff every block after the first meets the union of its predecessors inside some
/// I' x J' with min(|I'|, |J'|) <= r.
bool satisfies_chain_condition(const BlockFamily& fam, int r);

/// Certificate iff |T \ Omega| < sum_a (|I_a| - r)(|J_a| - r) for T the union of the blocks.
/// Throws PreconditionError when a block has a side of size <= r, an index is out of range,
/// or the chain condition fails.
std::optional<DependenceCertificate> asche_verify(const Pattern& p, const BlockFamily& fam,
                                                  const MatroidContext& ctx);

struct AscheSearchOptions {
  std::uint64_t node_budget = 2'000'000;
  int max_blocks = 8;
  int seeds = 64;
};

/// Best-effort search over chain-compatible families built from dense rectangles.
/// nullopt means "no certificate found", never "independent".
std::optional<DependenceCertificate> asche_search(const Pattern& p, const MatroidContext& ctx,
                                                  const AscheSearchOptions& opts = {});

/// Certificate iff height > |T \ Omega|; the height of I_T is supplied by the caller.
std::optional<DependenceCertificate> height_criterion_check(const Pattern& p, const Pattern& t, int height);
/// Rectangle form: the height is computed as (|I| - r)(|J| - r).
std::optional<DependenceCertificate> height_criterion_check(const Pattern& p, const Rectangle& t,
                                                            const MatroidContext& ctx);

struct ClosedFormResult {
  bool independent = true;
  /// Set when dependent; its support is a circuit for r = 1 and r = min - 1.
  std::optional<DependenceCertificate> certificate;
};

/// r = 1: independent iff the bipartite graph of p is a forest; otherwise returns a cycle.
ClosedFormResult closed_form_r1(const Pattern& p);
/// r = min(m, n) - 1: dependent iff min(m, n) lines of the longer side are full.
ClosedFormResult closed_form_corank1(const Pattern& p);
/// r = min(m, n) - 2: strip lines with <= r entries to a fixed point, then compare the size of
/// what remains with the rank bound. Throws RegimeError for any other r.
ClosedFormResult closed_form_corank2(const Pattern& p, const MatroidContext& ctx);

/// Whichever closed form covers ctx, or nullopt when r lies strictly between 1 and min - 2.
std::optional<ClosedFormResult> closed_form(const Pattern& p, const MatroidContext& ctx);

}  // namespace detmat
