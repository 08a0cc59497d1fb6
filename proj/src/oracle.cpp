#include "detmat/oracle.hpp"

#include "detmat/errors.hpp"
#include "closure_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <vector>

namespace detmat {

namespace {

constexpr std::uint64_t kRankStream = 0x6a61636f;
constexpr std::uint64_t kFiberStream = 0x66696272;

using Row = std::vector<std::uint64_t>;

// Rows kept in insertion order; each is reduced against its predecessors and scaled to a
// unit pivot, so reducing a vector against them in order clears every pivot column.
class EchelonBasis {
 public:
  explicit EchelonBasis(const PrimeField& field) : field_(field) {}

  int rank() const { return static_cast<int>(rows_.size()); }

  bool insert(Row v) {
    reduce(v);
    auto it = std::find_if(v.begin(), v.end(), [](std::uint64_t x) { return x != 0; });
    if (it == v.end()) return false;
    const std::size_t pivot = static_cast<std::size_t>(it - v.begin());
    const std::uint64_t scale = field_.inv(v[pivot]);
    for (std::uint64_t& x : v) x = field_.mul(x, scale);
    rows_.push_back(std::move(v));
    pivots_.push_back(pivot);
    return true;
  }

  bool spans(Row v) const {
    reduce(v);
    return std::all_of(v.begin(), v.end(), [](std::uint64_t x) { return x == 0; });
  }

 private:
  void reduce(Row& v) const {
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const std::uint64_t c = v[pivots_[k]];
      if (c == 0) continue;
      const Row& row = rows_[k];
      for (std::size_t t = 0; t < v.size(); ++t) {
        if (row[t] != 0) v[t] = field_.sub(v[t], field_.mul(c, row[t]));
      }
    }
  }

  const PrimeField& field_;
  std::vector<Row> rows_;
  std::vector<std::size_t> pivots_;
};

struct JacobianPoint {
  PrimeField field;
  FFMatrix a;
  FFMatrix b;
  int m;
  int n;
  int r;

  Row row(Cell c) const {
    Row v(static_cast<std::size_t>(r * (m + n)), 0);
    for (int k = 0; k < r; ++k) {
      v[static_cast<std::size_t>(c.row * r + k)] = b(k, c.col);
      v[static_cast<std::size_t>(m * r + k * n + c.col)] = a(c.row, k);
    }
    return v;
  }
};

JacobianPoint make_point(const MatroidContext& ctx, std::uint64_t prime, std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t index) {
  std::mt19937_64 rng = trial_stream(seed, stream, index);
  FFMatrix a = ff_random_matrix(rng, prime, ctx.rows(), ctx.rank());
  FFMatrix b = ff_random_matrix(rng, prime, ctx.rank(), ctx.cols());
  return {PrimeField(prime), std::move(a), std::move(b), ctx.rows(), ctx.cols(), ctx.rank()};
}

int rank_at(const Pattern& p, const JacobianPoint& pt) {
  EchelonBasis basis(pt.field);
  for (const Cell& c : p.cells()) basis.insert(pt.row(c));
  return basis.rank();
}

std::vector<JacobianPoint> sample_points(const MatroidContext& ctx, const OracleOptions& opts) {
  std::vector<JacobianPoint> pts;
  for (int t = 0; t < opts.trials; ++t)
    pts.push_back(make_point(ctx, opts.primary_prime, opts.seed, kRankStream, static_cast<std::uint64_t>(t)));
  for (int t = 0; t < opts.extra_prime_trials; ++t)
    pts.push_back(make_point(ctx, opts.secondary_prime, opts.seed, kRankStream + 1, static_cast<std::uint64_t>(t)));
  return pts;
}

void check_context(const Pattern& p, const MatroidContext& ctx) {
  if (!ctx.matches(p)) throw std::invalid_argument("pattern dimensions do not match the matroid context");
}

}  // namespace

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(index), hi(index)};
  return std::mt19937_64(seq);
}

FFMatrix jacobian_matrix(const Pattern& p, const MatroidContext& ctx, const FFMatrix& a, const FFMatrix& b,
                         const PrimeField& field) {
  check_context(p, ctx);
  const int m = ctx.rows();
  const int n = ctx.cols();
  const int r = ctx.rank();
  if (a.rows() != m || a.cols() != r || b.rows() != r || b.cols() != n) {
    throw std::invalid_argument("jacobian_matrix: A must be m x r and B must be r x n");
  }
  const std::vector<Cell> cells = p.cells();
  FFMatrix jac = FFMatrix::Zero(static_cast<Eigen::Index>(cells.size()), r * (m + n));
  for (std::size_t t = 0; t < cells.size(); ++t) {
    const Cell c = cells[t];
    const auto row = static_cast<Eigen::Index>(t);
    for (int k = 0; k < r; ++k) {
      jac(row, c.row * r + k) = field.reduce(b(k, c.col));
      jac(row, m * r + k * n + c.col) = field.reduce(a(c.row, k));
    }
  }
  return jac;
}

OracleVerdict matroid_rank(const Pattern& p, const MatroidContext& ctx, const OracleOptions& opts) {
  check_context(p, ctx);
  if (opts.trials < 1) throw std::invalid_argument("matroid_rank needs at least one trial");
  const int target = std::min(p.size(), ctx.rank_bound());
  OracleVerdict v;
  double miss = 1.0;
  auto run = [&](std::uint64_t prime, std::uint64_t stream, int count) {
    for (int t = 0; t < count && v.rank_estimate < target; ++t) {
      JacobianPoint pt = make_point(ctx, prime, opts.seed, stream, static_cast<std::uint64_t>(t));
      v.rank_estimate = std::max(v.rank_estimate, rank_at(p, pt));
      ++v.trials;
      miss *= static_cast<double>(target) / static_cast<double>(prime);
    }
  };
  run(opts.primary_prime, kRankStream, opts.trials);
  const int primary_points = v.trials;
  run(opts.secondary_prime, kRankStream + 1, opts.extra_prime_trials);

  std::ostringstream note;
  if (v.rank_estimate == target) {
    v.failure_bound = 0.0;
    note << "estimate attains min(|Omega|, r(m+n-r)) = " << target << "; exact";
  } else {
    v.failure_bound = miss;
    note << "P(estimate < true rank) <= " << miss << " (" << primary_points << " point(s) mod " << opts.primary_prime
         << ", " << (v.trials - primary_points) << " point(s) mod " << opts.secondary_prime
         << "; per-point bound " << target << "/p)";
  }
  v.failure_note = note.str();
  return v;
}

bool is_independent(const Pattern& p, const MatroidContext& ctx, const OracleOptions& opts) {
  return matroid_rank(p, ctx, opts).rank_estimate == p.size();
}

bool is_base(const Pattern& p, const MatroidContext& ctx, const OracleOptions& opts) {
  return p.size() == ctx.rank_bound() && is_independent(p, ctx, opts);
}

Pattern find_circuit(const Pattern& p, const MatroidContext& ctx, const OracleOptions& opts) {
  if (is_independent(p, ctx, opts)) throw PreconditionError("find_circuit: pattern is independent");
  Pattern current = p;
  for (const Cell& c : p.cells()) {
    Pattern candidate = current.without(c);
    if (!is_independent(candidate, ctx, opts)) current = std::move(candidate);
  }
  return current;
}

Pattern matroid_closure(const Pattern& p, const MatroidContext& ctx, const OracleOptions& opts) {
  check_context(p, ctx);
  std::vector<JacobianPoint> pts = sample_points(ctx, opts);
  std::vector<EchelonBasis> bases;
  int best = -1;
  for (const JacobianPoint& pt : pts) {
    EchelonBasis basis(pt.field);
    for (const Cell& c : p.cells()) basis.insert(pt.row(c));
    best = std::max(best, basis.rank());
    bases.push_back(std::move(basis));
  }
  Incidence inc = p.incidence();
  for (const Cell& c : p.missing_cells()) {
    bool dependent = true;
    for (std::size_t k = 0; k < pts.size() && dependent; ++k) {
      if (bases[k].rank() == best) dependent = bases[k].spans(pts[k].row(c));
    }
    inc(c.row, c.col) = dependent;
  }
  return Pattern(std::move(inc));
}

int FiberCountResult::trials_with(std::uint64_t count) const {
  auto it = counts.find(count);
  return it == counts.end() ? 0 : it->second;
}

double FiberCountResult::fraction_with(std::uint64_t count) const {
  return trials == 0 ? 0.0 : static_cast<double>(trials_with(count)) / trials;
}

namespace {

// Cells to branch on first: a smallest set found (within a search cap) whose addition makes the
// pattern close under generic rank-r minors, so propagation does the rest at most nodes.
std::vector<Cell> branching_plan(const Pattern& p, int r) {
  using detail::Mask;
  const int m = p.rows();
  const int n = p.cols();
  std::vector<Mask> rows(static_cast<std::size_t>(m));
  std::vector<Mask> cols(static_cast<std::size_t>(n));
  for (int i = 0; i < m; ++i) rows[static_cast<std::size_t>(i)] = p.row_mask(i);
  for (int j = 0; j < n; ++j) cols[static_cast<std::size_t>(j)] = p.col_mask(j);
  detail::close_masks(rows, cols, n, r);

  auto unknown_cells = [&](const std::vector<Mask>& rs) {
    std::vector<Cell> out;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        if (!((rs[static_cast<std::size_t>(i)] >> j) & 1)) out.push_back({i, j});
    return out;
  };
  auto closed_after = [&](const std::vector<Cell>& extra, std::vector<Mask>& rs, std::vector<Mask>& cs) {
    rs = rows;
    cs = cols;
    for (const Cell& c : extra) {
      rs[static_cast<std::size_t>(c.row)] |= Mask{1} << c.col;
      cs[static_cast<std::size_t>(c.col)] |= Mask{1} << c.row;
    }
    detail::close_masks(rs, cs, n, r);
    int left = 0;
    for (int i = 0; i < m; ++i) left += n - std::popcount(rs[static_cast<std::size_t>(i)]);
    return left;
  };

  const std::vector<Cell> base_unknown = unknown_cells(rows);
  if (base_unknown.empty()) return {};
  const int u = static_cast<int>(base_unknown.size());
  constexpr int kMaxPlanSize = 4;
  constexpr long kEvaluationCap = 50'000;
  long evaluations = 0;
  std::vector<Mask> rs;
  std::vector<Mask> cs;
  for (int k = 1; k <= std::min(kMaxPlanSize, u) && evaluations < kEvaluationCap; ++k) {
    std::vector<int> pick(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) pick[static_cast<std::size_t>(t)] = t;
    while (evaluations++ < kEvaluationCap) {
      std::vector<Cell> extra;
      for (int t : pick) extra.push_back(base_unknown[static_cast<std::size_t>(t)]);
      if (closed_after(extra, rs, cs) == 0) return extra;
      int t = k - 1;
      while (t >= 0 && pick[static_cast<std::size_t>(t)] == u - k + t) --t;
      if (t < 0) break;
      ++pick[static_cast<std::size_t>(t)];
      for (int s = t + 1; s < k; ++s) pick[static_cast<std::size_t>(s)] = pick[static_cast<std::size_t>(s - 1)] + 1;
    }
  }
  // Greedy fallback: add the cell that leaves the fewest unknowns after closing.
  std::vector<Cell> plan;
  while (true) {
    int best_left = -1;
    Cell best{};
    std::vector<Mask> cur_rows;
    std::vector<Mask> cur_cols;
    closed_after(plan, cur_rows, cur_cols);
    const std::vector<Cell> open = unknown_cells(cur_rows);
    if (open.empty()) return plan;
    for (const Cell& c : open) {
      std::vector<Cell> extra = plan;
      extra.push_back(c);
      const int left = closed_after(extra, rs, cs);
      if (best_left < 0 || left < best_left) {
        best_left = left;
        best = c;
      }
    }
    plan.push_back(best);
  }
}

// Depth-first enumeration of the completions of a partially known q-ary matrix. Each node
// first fills every entry forced by a known rank-r minor, then branches on one remaining
// unknown; leaves are full matrices tested for rank <= r. Residues are 32-bit with a table
// of inverses, so q must be small.
class CompletionCounter {
 public:
  CompletionCounter(const Pattern& p, int r, const FFMatrix& x, std::uint32_t q, std::uint64_t budget,
                    std::vector<Cell> plan)
      : m_(p.rows()), n_(p.cols()), r_(r), q_(q), budget_(budget), plan_(std::move(plan)),
        x_(static_cast<std::size_t>(m_ * n_), 0), known_(static_cast<std::size_t>(m_), 0),
        known_cols_(static_cast<std::size_t>(n_), 0), inv_(q, 0) {
    for (std::uint32_t v = 1; v < q; ++v) inv_[v] = static_cast<std::uint32_t>(pow_mod(v, q - 2));
    for (const Cell& c : p.cells()) set(c.row, c.col, static_cast<std::uint32_t>(x(c.row, c.col) % q));
    trail_.clear();
  }

  std::uint64_t count() {
    if (++nodes_ > budget_) {
      throw BudgetExceeded("fiber enumeration exceeded the node budget of " + std::to_string(budget_));
    }
    const std::size_t mark = trail_.size();
    std::uint64_t total = 0;
    if (propagate()) {
      Cell branch{-1, -1};
      int best = -1;
      for (const Cell& c : plan_) {
        if (!((known_[static_cast<std::size_t>(c.row)] >> c.col) & 1)) {
          branch = c;
          best = m_ + n_;
          break;
        }
      }
      for (int i = 0; i < m_ && best < m_ + n_; ++i) {
        std::uint64_t unknown = ~known_[static_cast<std::size_t>(i)] & full_row();
        const int in_row = std::popcount(known_[static_cast<std::size_t>(i)]);
        while (unknown != 0) {
          const int j = std::countr_zero(unknown);
          unknown &= unknown - 1;
          const int score = in_row + std::popcount(known_cols_[static_cast<std::size_t>(j)]);
          if (score > best) {
            best = score;
            branch = {i, j};
          }
        }
      }
      if (branch.row < 0) {
        total = full_rank_at_most_r() ? 1 : 0;
      } else {
        for (std::uint32_t v = 0; v < q_; ++v) {
          set(branch.row, branch.col, v);
          total += count();
          undo(trail_.size() - 1);
        }
      }
    }
    undo(mark);
    return total;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e) const {
    std::uint64_t acc = 1;
    for (b %= q_; e > 0; e >>= 1, b = b * b % q_)
      if (e & 1) acc = acc * b % q_;
    return acc;
  }

  std::uint64_t full_row() const { return n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1; }
  std::uint32_t& at(int i, int j) { return x_[static_cast<std::size_t>(i * n_ + j)]; }

  void set(int i, int j, std::uint32_t v) {
    at(i, j) = v;
    known_[static_cast<std::size_t>(i)] |= std::uint64_t{1} << j;
    known_cols_[static_cast<std::size_t>(j)] |= std::uint64_t{1} << i;
    trail_.push_back({i, j});
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      const Cell c = trail_.back();
      trail_.pop_back();
      known_[static_cast<std::size_t>(c.row)] &= ~(std::uint64_t{1} << c.col);
      known_cols_[static_cast<std::size_t>(c.col)] &= ~(std::uint64_t{1} << c.row);
    }
  }

  // Row-reduces `rows` (each of width w) in place; returns the rank, or r + 1 once it exceeds r.
  int eliminate(std::vector<std::uint32_t>& a, int rows, int w, std::vector<int>& pivot_col) {
    pivot_col.clear();
    int rank = 0;
    for (int c = 0; c < w && rank < rows; ++c) {
      int piv = -1;
      for (int k = rank; k < rows; ++k)
        if (a[static_cast<std::size_t>(k * w + c)] != 0) {
          piv = k;
          break;
        }
      if (piv < 0) continue;
      if (piv != rank)
        for (int t = 0; t < w; ++t)
          std::swap(a[static_cast<std::size_t>(piv * w + t)], a[static_cast<std::size_t>(rank * w + t)]);
      const std::uint64_t s = inv_[a[static_cast<std::size_t>(rank * w + c)]];
      for (int t = c; t < w; ++t) {
        auto& e = a[static_cast<std::size_t>(rank * w + t)];
        e = static_cast<std::uint32_t>(e * s % q_);
      }
      for (int k = 0; k < rows; ++k) {
        if (k == rank) continue;
        const std::uint64_t f = a[static_cast<std::size_t>(k * w + c)];
        if (f == 0) continue;
        for (int t = c; t < w; ++t) {
          auto& e = a[static_cast<std::size_t>(k * w + t)];
          e = static_cast<std::uint32_t>((e + (q_ - f) * a[static_cast<std::size_t>(rank * w + t)]) % q_);
        }
      }
      pivot_col.push_back(c);
      if (++rank > r_) return rank;
    }
    return rank;
  }

  bool full_rank_at_most_r() {
    scratch_.assign(x_.begin(), x_.end());
    return eliminate(scratch_, m_, n_, pivots_) <= r_;
  }

  // Returns false when some fully known submatrix already has rank > r.
  bool propagate() {
    for (bool changed = true; changed;) {
      changed = false;
      for (int i = 0; i < m_; ++i) {
        std::uint64_t unknown = ~known_[static_cast<std::size_t>(i)] & full_row();
        while (unknown != 0) {
          const int j = std::countr_zero(unknown);
          unknown &= unknown - 1;
          const int outcome = try_force(i, j);
          if (outcome < 0) return false;
          if (outcome > 0) changed = true;
        }
      }
    }
    return true;
  }

  // 1: x(i, j) was forced; 0: nothing learned; -1: contradiction.
  int try_force(int i, int j) {
    const std::uint64_t row_i = known_[static_cast<std::size_t>(i)];
    if (std::popcount(row_i) < r_) return 0;
    candidates_.clear();
    for (std::uint64_t cm = known_cols_[static_cast<std::size_t>(j)] & ~(std::uint64_t{1} << i); cm != 0;
         cm &= cm - 1) {
      const int rho = std::countr_zero(cm);
      const int overlap = std::popcount(known_[static_cast<std::size_t>(rho)] & row_i);
      if (overlap >= r_) candidates_.push_back({overlap, rho});
    }
    if (static_cast<int>(candidates_.size()) < r_) return 0;
    std::stable_sort(candidates_.begin(), candidates_.end(), [](auto a, auto b) { return a.first > b.first; });
    rows_.clear();
    std::uint64_t cols = row_i;
    for (auto [overlap, rho] : candidates_) {
      const std::uint64_t narrowed = cols & known_[static_cast<std::size_t>(rho)];
      if (std::popcount(narrowed) < r_) continue;
      rows_.push_back(rho);
      cols = narrowed;
      if (static_cast<int>(rows_.size()) < r_) continue;
      const int outcome = force_from(i, j, cols);
      if (outcome != 0) return outcome;
    }
    return 0;
  }

  // Augmented block [X[R, C] | X[R, j]] over the chosen rows; forces x(i, j) once X[R, C]
  // has rank r.
  int force_from(int i, int j, std::uint64_t cols) {
    col_idx_.clear();
    for (std::uint64_t cm = cols; cm != 0; cm &= cm - 1) col_idx_.push_back(std::countr_zero(cm));
    const int w = static_cast<int>(col_idx_.size()) + 1;
    const int rows = static_cast<int>(rows_.size());
    scratch_.assign(static_cast<std::size_t>(rows * w), 0);
    for (int a = 0; a < rows; ++a) {
      for (int b = 0; b + 1 < w; ++b) scratch_[static_cast<std::size_t>(a * w + b)] = at(rows_[static_cast<std::size_t>(a)], col_idx_[static_cast<std::size_t>(b)]);
      scratch_[static_cast<std::size_t>(a * w + w - 1)] = at(rows_[static_cast<std::size_t>(a)], j);
    }
    const int rank = eliminate(scratch_, rows, w, pivots_);
    if (rank > r_) return -1;
    int core = 0;
    for (int c : pivots_) core += c + 1 < w ? 1 : 0;
    if (core < r_) return 0;
    if (rank > core) return -1;
    // Express X[i, C] through the reduced rows; the same combination gives x(i, j).
    std::uint64_t value = 0;
    for (std::size_t k = 0; k < pivots_.size(); ++k) {
      const int c = pivots_[k];
      const std::uint64_t f = at(i, col_idx_[static_cast<std::size_t>(c)]);
      if (f != 0) value = (value + f * scratch_[k * static_cast<std::size_t>(w) + static_cast<std::size_t>(w - 1)]) % q_;
    }
    // The rows are fully reduced, so X[i, C] lies in their span iff it matches off the pivots.
    for (int b = 0; b + 1 < w; ++b) {
      std::uint64_t v = at(i, col_idx_[static_cast<std::size_t>(b)]);
      for (std::size_t k = 0; k < pivots_.size(); ++k) {
        const std::uint64_t f = at(i, col_idx_[static_cast<std::size_t>(pivots_[k])]);
        v = (v + (q_ - f) * scratch_[k * static_cast<std::size_t>(w) + static_cast<std::size_t>(b)] % q_) % q_;
      }
      if (v != 0) return -1;
    }
    set(i, j, static_cast<std::uint32_t>(value));
    return 1;
  }

  int m_;
  int n_;
  int r_;
  std::uint64_t q_;
  std::uint64_t budget_;
  std::vector<Cell> plan_;
  std::uint64_t nodes_ = 0;
  std::vector<std::uint32_t> x_;
  std::vector<std::uint64_t> known_;
  std::vector<std::uint64_t> known_cols_;
  std::vector<std::uint32_t> inv_;
  std::vector<Cell> trail_;
  std::vector<std::uint32_t> scratch_;
  std::vector<int> pivots_;
  std::vector<int> rows_;
  std::vector<int> col_idx_;
  std::vector<std::pair<int, int>> candidates_;
};

std::uint64_t count_with_plan(const Pattern& p, int r, const FFMatrix& x, const PrimeField& field,
                              std::uint64_t node_budget, std::uint64_t* nodes_used, std::vector<Cell> plan) {
  if (x.rows() != p.rows() || x.cols() != p.cols()) {
    throw std::invalid_argument("count_completions: value matrix does not match pattern");
  }
  if (field.modulus() >= (std::uint64_t{1} << 31)) {
    throw std::invalid_argument("count_completions enumerates residues and needs q < 2^31");
  }
  CompletionCounter counter(p, r, x, static_cast<std::uint32_t>(field.modulus()), node_budget, std::move(plan));
  std::uint64_t total = 0;
  try {
    total = counter.count();
  } catch (...) {
    if (nodes_used) *nodes_used = counter.nodes();
    throw;
  }
  if (nodes_used) *nodes_used = counter.nodes();
  return total;
}

}  // namespace

std::uint64_t count_completions(const Pattern& p, int r, const FFMatrix& x, const PrimeField& field,
                                std::uint64_t node_budget, std::uint64_t* nodes_used) {
  return count_with_plan(p, r, x, field, node_budget, nodes_used, branching_plan(p, r));
}

FiberCountResult fiber_count(const Pattern& p, const MatroidContext& ctx, const FiberOptions& opts) {
  check_context(p, ctx);
  if (!is_prime(opts.q)) throw std::invalid_argument("fiber_count: q=" + std::to_string(opts.q) + " is not prime");
  if (opts.trials < 1) throw std::invalid_argument("fiber_count needs at least one trial");
  const PrimeField field(opts.q);
  FiberCountResult result;
  result.q = opts.q;
  result.unknowns = p.rows() * p.cols() - p.size();
  result.low_confidence = opts.q < 7;
  if (opts.regular_points_only) result.generic_rank = matroid_rank(p, ctx).rank_estimate;
  const std::vector<Cell> plan = branching_plan(p, ctx.rank());
  for (int t = 0; t < opts.trials; ++t) {
    std::mt19937_64 rng = trial_stream(opts.seed, kFiberStream, static_cast<std::uint64_t>(t));
    FFMatrix a;
    FFMatrix b;
    for (int rejected = 0;; ++rejected) {
      if (rejected > opts.max_rejections_per_trial) {
        throw BudgetExceeded("fiber_count: no regular sample point over Z/" + std::to_string(opts.q) + " after " +
                             std::to_string(rejected) + " draws");
      }
      a = ff_random_matrix(rng, opts.q, ctx.rows(), ctx.rank());
      b = ff_random_matrix(rng, opts.q, ctx.rank(), ctx.cols());
      if (!opts.regular_points_only || ff_rank(jacobian_matrix(p, ctx, a, b, field), field) == result.generic_rank) {
        break;
      }
      ++result.rejected;
    }
    const FFMatrix x = ff_multiply(a, b, field);
    std::uint64_t nodes = 0;
    const std::uint64_t c = count_with_plan(p, ctx.rank(), x, field, opts.node_budget, &nodes, plan);
    result.nodes += nodes;
    ++result.counts[c];
    ++result.trials;
  }
  return result;
}

}  // namespace detmat
