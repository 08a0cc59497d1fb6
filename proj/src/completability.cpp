#include "detmat/completability.hpp"

#include "detmat/errors.hpp"
#include "closure_core.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace detmat {

namespace {

using detail::Mask;

Mask bit(int k) { return Mask{1} << k; }

std::string histogram_text(const FiberCountResult& f) {
  std::ostringstream s;
  bool first = true;
  for (auto [count, trials] : f.counts) {
    s << (first ? "" : ",") << count << ":" << trials;
    first = false;
  }
  return s.str();
}

std::string dims(const MatroidContext& ctx) {
  return std::to_string(ctx.rows()) + "x" + std::to_string(ctx.cols());
}

CompletabilityVerdict make_verdict(CompletionStatus status, Uniqueness u, std::optional<bool> base) {
  CompletabilityVerdict v;
  v.status = status;
  v.uniqueness = u;
  v.is_base = base;
  return v;
}

bool zeros_in_general_position(const Pattern& p) {
  Mask rows = 0;
  Mask cols = 0;
  for (const Cell& c : p.missing_cells()) {
    if ((rows & bit(c.row)) || (cols & bit(c.col))) return false;
    rows |= bit(c.row);
    cols |= bit(c.col);
  }
  return true;
}

// Exact matroid rank in a corank-2 regime: greedy growth with the closed-form independence test.
int corank2_rank(const Pattern& p, const MatroidContext& ctx) {
  Pattern cur(p.rows(), p.cols());
  for (const Cell& c : p.cells()) {
    Pattern next = cur.with(c);
    if (closed_form_corank2(next, ctx).independent) cur = std::move(next);
  }
  return cur.size();
}

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(acc);
}

// Searches the bases inside p for one whose zeros are not in general position.
std::optional<Pattern> unique_contained_base(const Pattern& p, const MatroidContext& ctx, int extra) {
  const std::vector<Cell> cells = p.cells();
  const int s = static_cast<int>(cells.size());
  std::vector<int> pick(static_cast<std::size_t>(extra));
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    Pattern b = p;
    for (int k : pick) b = b.without(cells[static_cast<std::size_t>(k)]);
    if (closed_form_corank2(b, ctx).independent && !zeros_in_general_position(b)) return b;
    int k = extra - 1;
    while (k >= 0 && pick[static_cast<std::size_t>(k)] == s - extra + k) --k;
    if (k < 0) return std::nullopt;
    ++pick[static_cast<std::size_t>(k)];
    for (int t = k + 1; t < extra; ++t) pick[static_cast<std::size_t>(t)] = pick[static_cast<std::size_t>(t - 1)] + 1;
  }
}

struct PipelineState {
  CompletabilityVerdict v;
  int bound = 0;  // rank bound of the current context

  void note(std::string rule, std::vector<std::pair<std::string, std::string>> params = {}) {
    v.evidence.push_back({std::move(rule), std::move(params)});
  }

  bool status_known() const { return v.status != CompletionStatus::Unknown; }
  bool uniqueness_known() const { return v.uniqueness != Uniqueness::Undetermined; }

  void set_finite(bool finite, Confidence conf, bool is_base) {
    if (status_known()) return;
    v.status = finite ? CompletionStatus::FinitelyCompletable : CompletionStatus::NotFinitelyCompletable;
    v.confidence = conf;
    v.is_base = finite && is_base;
    if (!finite) set_unique(false, conf);
    promote();
  }

  void set_unique(bool unique, Confidence conf) {
    if (uniqueness_known()) return;
    v.uniqueness = unique ? Uniqueness::Unique : Uniqueness::NotUnique;
    v.uniqueness_confidence = conf;
    promote();
  }

  void promote() {
    if (v.status == CompletionStatus::FinitelyCompletable && v.uniqueness == Uniqueness::Unique) {
      v.status = CompletionStatus::UniquelyCompletable;
      v.confidence = v.uniqueness_confidence;
    }
  }

  // Adopts a closed-form verdict (status and uniqueness both settled).
  void adopt(const CompletabilityVerdict& cf, const std::string& rule, const MatroidContext& ctx) {
    std::vector<std::pair<std::string, std::string>> params{{"pattern", dims(ctx)},
                                                            {"r", std::to_string(ctx.rank())}};
    for (const Evidence& e : cf.evidence)
      for (const auto& kv : e.params) params.push_back(kv);
    note(rule, std::move(params));
    const bool finite = cf.finitely_completable();
    set_finite(finite, Confidence::Proved, cf.is_base.value_or(false));
    if (finite) set_unique(cf.uniqueness == Uniqueness::Unique, Confidence::Proved);
    if (cf.certificate && !v.certificate) v.certificate = cf.certificate;
  }
};

}  // namespace

std::string to_string(CompletionStatus s) {
  switch (s) {
    case CompletionStatus::NotFinitelyCompletable: return "NotFinitelyCompletable";
    case CompletionStatus::FinitelyCompletable: return "FinitelyCompletable";
    case CompletionStatus::UniquelyCompletable: return "UniquelyCompletable";
    case CompletionStatus::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::string to_string(Uniqueness u) {
  switch (u) {
    case Uniqueness::Unique: return "Unique";
    case Uniqueness::NotUnique: return "NotUnique";
    case Uniqueness::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

std::string to_string(Confidence c) { return c == Confidence::Proved ? "Proved" : "Probabilistic"; }

ClosureTrace greedy_closure(const Pattern& p, const MatroidContext& ctx) {
  if (!ctx.matches(p)) throw std::invalid_argument("pattern dimensions do not match the matroid context");
  std::vector<Mask> known_rows(static_cast<std::size_t>(p.rows()));
  std::vector<Mask> known_cols(static_cast<std::size_t>(p.cols()));
  for (int i = 0; i < p.rows(); ++i) known_rows[static_cast<std::size_t>(i)] = p.row_mask(i);
  for (int j = 0; j < p.cols(); ++j) known_cols[static_cast<std::size_t>(j)] = p.col_mask(j);
  ClosureTrace trace;
  for (const detail::RawStep& s : detail::close_masks(known_rows, known_cols, p.cols(), ctx.rank())) {
    trace.order.push_back({{s.row, s.col}, mask_to_indices(s.witness_rows), mask_to_indices(s.witness_cols)});
  }
  for (int i = 0; i < p.rows(); ++i)
    for (int j = 0; j < p.cols(); ++j)
      if (!((known_rows[static_cast<std::size_t>(i)] >> j) & 1)) trace.residual.push_back({i, j});
  return trace;
}

UniqueReduction column_reduce_unique(const Pattern& p, const MatroidContext& ctx) {
  if (!ctx.matches(p)) throw std::invalid_argument("pattern dimensions do not match the matroid context");
  const int r = ctx.rank();
  UniqueReduction out;
  out.rank = r;
  out.kept_rows.resize(static_cast<std::size_t>(p.rows()));
  out.kept_cols.resize(static_cast<std::size_t>(p.cols()));
  std::iota(out.kept_rows.begin(), out.kept_rows.end(), 0);
  std::iota(out.kept_cols.begin(), out.kept_cols.end(), 0);
  Pattern cur = p;

  auto short_line = [&]() -> std::optional<LineDrop> {
    for (int j = 0; j < cur.cols(); ++j)
      if (cur.col_count(j) < r) return LineDrop{false, out.kept_cols[static_cast<std::size_t>(j)]};
    for (int i = 0; i < cur.rows(); ++i)
      if (cur.row_count(i) < r) return LineDrop{true, out.kept_rows[static_cast<std::size_t>(i)]};
    return std::nullopt;
  };

  while (true) {
    out.short_line = short_line();
    if (out.short_line) break;
    bool dropped = false;
    for (int j = 0; j < cur.cols() && !dropped; ++j) {
      if (cur.col_count(j) != r) continue;
      if (cur.cols() - 1 <= r) {
        out.stopped_at_boundary = true;
        break;
      }
      out.dropped.push_back({false, out.kept_cols[static_cast<std::size_t>(j)]});
      out.kept_cols.erase(out.kept_cols.begin() + j);
      IndexSet cols(static_cast<std::size_t>(cur.cols()));
      std::iota(cols.begin(), cols.end(), 0);
      cols.erase(cols.begin() + j);
      IndexSet rows(static_cast<std::size_t>(cur.rows()));
      std::iota(rows.begin(), rows.end(), 0);
      cur = restrict_to(cur, rows, cols);
      dropped = true;
    }
    for (int i = 0; i < cur.rows() && !dropped; ++i) {
      if (cur.row_count(i) != r) continue;
      if (cur.rows() - 1 <= r) {
        out.stopped_at_boundary = true;
        break;
      }
      out.dropped.push_back({true, out.kept_rows[static_cast<std::size_t>(i)]});
      out.kept_rows.erase(out.kept_rows.begin() + i);
      IndexSet rows(static_cast<std::size_t>(cur.rows()));
      std::iota(rows.begin(), rows.end(), 0);
      rows.erase(rows.begin() + i);
      IndexSet cols(static_cast<std::size_t>(cur.cols()));
      std::iota(cols.begin(), cols.end(), 0);
      cur = restrict_to(cur, rows, cols);
      dropped = true;
    }
    if (!dropped) break;
  }
  out.pattern = std::move(cur);
  return out;
}

CompletabilityVerdict unique_r1(const Pattern& p) {
  const int m = p.rows();
  const int n = p.cols();
  if (std::min(m, n) < 2) throw RegimeError("rank-1 decision needs min(m, n) >= 2");
  std::vector<int> parent(static_cast<std::size_t>(m + n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] =
                                                         parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  int components = m + n;
  for (const Cell& c : p.cells()) {
    const int a = find(c.row);
    const int b = find(m + c.col);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --components;
    }
  }
  bool lines_nonempty = true;
  for (int i = 0; i < m; ++i) lines_nonempty = lines_nonempty && p.row_count(i) > 0;
  for (int j = 0; j < n; ++j) lines_nonempty = lines_nonempty && p.col_count(j) > 0;
  const bool unique = components == 1;
  CompletabilityVerdict v = make_verdict(
      unique ? CompletionStatus::UniquelyCompletable : CompletionStatus::NotFinitelyCompletable,
      unique ? Uniqueness::Unique : Uniqueness::NotUnique, unique && p.size() == m + n - 1);
  v.evidence.push_back({"closed-form-r1",
                        {{"components", std::to_string(components)},
                         {"lines_nonempty", lines_nonempty ? "true" : "false"}}});
  if (!unique) v.is_base = false;
  const ClosedFormResult cf = closed_form_r1(p);
  if (!cf.independent) v.certificate = cf.certificate;
  return v;
}

CompletabilityVerdict unique_corank1(const Pattern& p) {
  if (std::min(p.rows(), p.cols()) < 2) throw RegimeError("corank-1 decision needs min(m, n) >= 2");
  const Pattern q = p.rows() <= p.cols() ? p : transpose(p);
  const int m = q.rows();
  int short_lines = 0;
  int full = 0;
  for (int j = 0; j < q.cols(); ++j) {
    if (q.col_count(j) < m - 1) ++short_lines;
    if (q.col_count(j) == m) ++full;
  }
  const bool unique = short_lines == 0 && full >= m - 1;
  const int bound = (m - 1) * (q.cols() + 1);
  CompletabilityVerdict v = make_verdict(
      unique ? CompletionStatus::UniquelyCompletable : CompletionStatus::NotFinitelyCompletable,
      unique ? Uniqueness::Unique : Uniqueness::NotUnique, unique && p.size() == bound);
  v.evidence.push_back({"closed-form-corank1",
                        {{"short_lines", std::to_string(short_lines)}, {"full_lines", std::to_string(full)},
                         {"needed_full", std::to_string(m - 1)}}});
  const ClosedFormResult cf = closed_form_corank1(p);
  if (!cf.independent) v.certificate = cf.certificate;
  return v;
}

CompletabilityVerdict unique_corank2_square(const Pattern& p) {
  const int m = p.rows();
  if (m != p.cols() || m < 3) throw RegimeError("corank-2 square decision needs an m x m pattern with m >= 3");
  const MatroidContext ctx(m, m, m - 2);
  if (p.size() != ctx.rank_bound() || !closed_form_corank2(p, ctx).independent) {
    throw PreconditionError("unique_corank2_square expects a base of M(m-2, [m] x [m])");
  }
  const bool exceptional = zeros_in_general_position(p);
  CompletabilityVerdict v = make_verdict(
      exceptional ? CompletionStatus::FinitelyCompletable : CompletionStatus::UniquelyCompletable,
      exceptional ? Uniqueness::NotUnique : Uniqueness::Unique, true);
  v.evidence.push_back({"corank2-square", {{"zeros_distinct_lines", exceptional ? "true" : "false"}}});
  return v;
}

CompletabilityVerdict verdict_pipeline(const Pattern& p, const MatroidContext& ctx, const PipelineOptions& opts) {
  if (!ctx.matches(p)) throw std::invalid_argument("pattern dimensions do not match the matroid context");
  PipelineState st;
  st.note("context", {{"pattern", dims(ctx)},
                      {"r", std::to_string(ctx.rank())},
                      {"observed", std::to_string(p.size())},
                      {"rank_bound", std::to_string(ctx.rank_bound())}});
  if (p.size() < ctx.rank_bound()) {
    st.note("size-bound", {{"observed", std::to_string(p.size())}, {"rank_bound", std::to_string(ctx.rank_bound())}});
    st.set_finite(false, Confidence::Proved, false);
    return st.v;
  }

  Pattern cur = p;
  MatroidContext cc = ctx;
  while (true) {
    const int r = cc.rank();
    const UniqueReduction red = column_reduce_unique(cur, cc);
    if (!red.dropped.empty()) {
      int rows = 0;
      for (const LineDrop& d : red.dropped) rows += d.is_row ? 1 : 0;
      st.note("line-reduction", {{"dropped_rows", std::to_string(rows)},
                                 {"dropped_cols", std::to_string(red.dropped.size() - rows)},
                                 {"result", std::to_string(red.pattern.rows()) + "x" +
                                                std::to_string(red.pattern.cols())}});
    }
    if (red.short_line) {
      const LineDrop& s = *red.short_line;
      st.note("short-line", {{"line", std::string(s.is_row ? "row " : "column ") + std::to_string(s.index + 1)},
                             {"r", std::to_string(r)}});
      st.set_finite(false, Confidence::Proved, false);
      break;
    }
    cur = red.pattern;
    cc = MatroidContext::for_pattern(cur, r);
    st.bound = cc.rank_bound();

    const int lo = std::min(cur.rows(), cur.cols());
    if (r == 1) {
      st.adopt(unique_r1(cur), "closed-form-r1", cc);
    } else if (r == lo - 1) {
      st.adopt(unique_corank1(cur), "closed-form-corank1", cc);
    } else if (r == lo - 2) {
      const int rank = corank2_rank(cur, cc);
      const bool finite = rank == cc.rank_bound();
      st.note("closed-form-corank2", {{"pattern", dims(cc)},
                                      {"r", std::to_string(r)},
                                      {"rank", std::to_string(rank)},
                                      {"rank_bound", std::to_string(cc.rank_bound())}});
      if (!finite && cur.size() == cc.rank_bound()) {
        const ClosedFormResult cf = closed_form_corank2(cur, cc);
        if (cf.certificate && !st.v.certificate) st.v.certificate = cf.certificate;
      }
      st.set_finite(finite, Confidence::Proved, cur.size() == cc.rank_bound());
      if (finite && cur.rows() == cur.cols() && !st.uniqueness_known()) {
        const int extra = cur.size() - cc.rank_bound();
        if (extra == 0) {
          const CompletabilityVerdict sq = unique_corank2_square(cur);
          st.note("corank2-square", sq.evidence.front().params);
          st.set_unique(sq.uniqueness == Uniqueness::Unique, Confidence::Proved);
        } else if (binomial_capped(static_cast<std::uint64_t>(cur.size()), static_cast<std::uint64_t>(extra),
                                   opts.contained_base_limit) <= opts.contained_base_limit) {
          if (unique_contained_base(cur, cc, extra)) {
            st.note("corank2-square", {{"contained_unique_base", "true"}});
            st.set_unique(true, Confidence::Proved);
          } else {
            st.note("corank2-square", {{"contained_unique_base", "false"}});
          }
        }
      }
    }
    if (st.status_known() && st.uniqueness_known()) break;

    if (r < 2) break;
    int full_row = -1;
    int full_col = -1;
    for (int i = 0; i < cur.rows() && full_row < 0; ++i)
      if (cur.row_count(i) == cur.cols()) full_row = i;
    for (int j = 0; j < cur.cols() && full_col < 0; ++j)
      if (cur.col_count(j) == cur.rows()) full_col = j;
    if (full_row < 0 || full_col < 0) break;
    IndexSet row_perm(static_cast<std::size_t>(cur.rows()));
    IndexSet col_perm(static_cast<std::size_t>(cur.cols()));
    for (int i = 0; i < cur.rows(); ++i) row_perm[static_cast<std::size_t>(i)] = i < full_row ? i : i - 1;
    for (int j = 0; j < cur.cols(); ++j) col_perm[static_cast<std::size_t>(j)] = j < full_col ? j : j - 1;
    row_perm[static_cast<std::size_t>(full_row)] = cur.rows() - 1;
    col_perm[static_cast<std::size_t>(full_col)] = cur.cols() - 1;
    cur = excise(permute(cur, row_perm, col_perm));
    cc = MatroidContext::for_pattern(cur, r - 1);
    st.note("excision", {{"row", std::to_string(full_row + 1)},
                         {"col", std::to_string(full_col + 1)},
                         {"result", dims(cc)},
                         {"r", std::to_string(r - 1)}});
  }
  st.bound = cc.rank_bound();

  if (!st.uniqueness_known()) {
    ClosureTrace trace = greedy_closure(p, ctx);
    st.note("greedy-closure", {{"determined", std::to_string(trace.order.size())},
                               {"residual", std::to_string(trace.residual.size())}});
    const bool complete = trace.complete();
    st.v.closure = std::move(trace);
    if (complete) {
      st.set_finite(true, Confidence::Proved, p.size() == ctx.rank_bound());
      st.set_unique(true, Confidence::Proved);
    }
  }

  if (!st.status_known() && p.size() == ctx.rank_bound()) {
    if (auto cert = block_dependence_scan(p, ctx)) {
      st.note("block", {{"inequality", cert->inequality}});
      st.v.certificate = std::move(cert);
      st.set_finite(false, Confidence::Proved, false);
    } else if (auto asche = asche_search(p, ctx, opts.asche)) {
      st.note("asche", {{"inequality", asche->inequality}});
      st.v.certificate = std::move(asche);
      st.set_finite(false, Confidence::Proved, false);
    } else if (p.rows() <= kMaxSlmfRows) {
      if (!slmf_necessary_check(p, ctx)) {
        const SlmfResult s = slmf_evaluate(p, {ctx.rank(), ctx.rank(), ctx.rows()});
        st.note("slmf-necessary", {{"violation", s.violation ? format_index_set(*s.violation) : "{}"},
                                   {"lhs", std::to_string(s.lhs)},
                                   {"rhs", std::to_string(s.rhs)}});
        st.set_finite(false, Confidence::Proved, false);
      } else {
        bool exhausted = false;
        if (auto groups = partition_slmf_search(p, ctx, opts.partition_budget, &exhausted)) {
          std::string text;
          for (const IndexSet& g : *groups) text += (text.empty() ? "" : " ") + format_index_set(g);
          st.note("partition-slmf", {{"groups", text}});
          st.set_finite(true, Confidence::Proved, true);
        } else {
          st.note("partition-slmf", {{"groups", exhausted ? "budget exhausted" : "none"}});
        }
      }
    }
  }

  if (!st.status_known()) {
    OracleVerdict o = matroid_rank(cur, cc, opts.oracle);
    const bool full = o.rank_estimate == cc.rank_bound();
    std::ostringstream fb;
    fb << o.failure_bound;
    st.note("oracle-rank", {{"pattern", dims(cc)},
                            {"r", std::to_string(cc.rank())},
                            {"rank", std::to_string(o.rank_estimate)},
                            {"rank_bound", std::to_string(cc.rank_bound())},
                            {"trials", std::to_string(o.trials)},
                            {"failure_bound", fb.str()}});
    st.set_finite(full, full ? Confidence::Proved : Confidence::Probabilistic, cur.size() == cc.rank_bound());
    st.v.oracle = std::move(o);
  }

  const bool want_fiber = st.v.finitely_completable() && opts.run_fiber &&
                          (!st.uniqueness_known() || opts.fiber_when_proved);
  if (want_fiber) {
    const bool decide = !st.uniqueness_known();
    try {
      FiberCountResult f = fiber_count(cur, cc, opts.fiber);
      const double one = f.fraction_with(1);
      st.note(decide ? "fiber-statistics" : "fiber-corroboration",
              {{"pattern", dims(cc)},
               {"r", std::to_string(cc.rank())},
               {"q", std::to_string(f.q)},
               {"trials", std::to_string(f.trials)},
               {"histogram", histogram_text(f)},
               {"rejected", std::to_string(f.rejected)}});
      if (decide) {
        if (one >= opts.unique_threshold) {
          st.set_unique(true, Confidence::Probabilistic);
        } else if (1.0 - one >= opts.not_unique_threshold) {
          st.set_unique(false, Confidence::Probabilistic);
        }
      }
      st.v.fiber = std::move(f);
    } catch (const BudgetExceeded& e) {
      st.note(decide ? "fiber-statistics" : "fiber-corroboration", {{"error", e.what()}});
    }
  }
  return st.v;
}

RankDescentReport rank_descent_check(const Pattern& p, const MatroidContext& ctx, int lower_rank,
                                     const PipelineOptions& opts) {
  if (lower_rank < 1 || lower_rank > ctx.rank()) {
    throw std::invalid_argument("rank_descent_check needs 1 <= lower rank <= r");
  }
  RankDescentReport out;
  out.lower_rank = lower_rank;
  PipelineOptions quiet = opts;
  quiet.run_fiber = false;
  const CompletabilityVerdict v = verdict_pipeline(p, ctx, quiet);
  out.applicable = v.status == CompletionStatus::UniquelyCompletable && v.confidence == Confidence::Proved;
  if (!out.applicable) return out;
  const MatroidContext low(ctx.rows(), ctx.cols(), lower_rank);
  out.fiber = fiber_count(p, low, opts.fiber);
  out.holds = out.fiber->fraction_with(1) >= opts.unique_threshold;
  return out;
}

}  // namespace detmat
