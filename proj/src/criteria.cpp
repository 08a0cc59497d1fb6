#include "detmat/criteria.hpp"

#include "detmat/errors.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

namespace detmat {

namespace {

using Mask = std::uint64_t;

Mask low_bits(int k) { return k >= 64 ? ~Mask{0} : (Mask{1} << k) - 1; }

int pc(Mask x) { return std::popcount(x); }

int count_in(const Pattern& p, Mask rows, Mask cols) {
  int c = 0;
  for (Mask rm = rows; rm != 0; rm &= rm - 1) c += pc(p.row_mask(std::countr_zero(rm)) & cols);
  return c;
}

Rectangle rect_from_masks(Mask rows, Mask cols) { return {mask_to_indices(rows), mask_to_indices(cols)}; }

std::string rect_text(const Rectangle& rect) {
  return format_index_set(rect.rows) + " x " + format_index_set(rect.cols);
}

// Union of the rectangles as per-row column masks.
std::vector<Mask> union_rows(int m, const std::vector<std::pair<Mask, Mask>>& blocks) {
  std::vector<Mask> u(static_cast<std::size_t>(m), 0);
  for (auto [rows, cols] : blocks)
    for (Mask rm = rows; rm != 0; rm &= rm - 1) u[static_cast<std::size_t>(std::countr_zero(rm))] |= cols;
  return u;
}

std::vector<Cell> missing_cells_of(const Pattern& p, const std::vector<Mask>& t_rows) {
  std::vector<Cell> out;
  for (int i = 0; i < p.rows(); ++i) {
    for (Mask cm = t_rows[static_cast<std::size_t>(i)] & ~p.row_mask(i); cm != 0; cm &= cm - 1) {
      out.push_back({i, std::countr_zero(cm)});
    }
  }
  return out;
}

Pattern pattern_from_rows(int m, int n, const std::vector<Mask>& t_rows) {
  Incidence inc = Incidence::Constant(m, n, false);
  for (int i = 0; i < m; ++i)
    for (Mask cm = t_rows[static_cast<std::size_t>(i)]; cm != 0; cm &= cm - 1) inc(i, std::countr_zero(cm)) = true;
  return Pattern(std::move(inc));
}

// Certificate for a single rectangle that violates |Omega ∩ (I x J)| <= r(|I| + |J| - r).
DependenceCertificate rectangle_certificate(const Pattern& p, Mask rows, Mask cols, int r, CertificateKind kind) {
  DependenceCertificate cert;
  cert.kind = kind;
  const Rectangle rect = rect_from_masks(rows, cols);
  cert.family.blocks.push_back(rect);
  const std::vector<Mask> t = union_rows(p.rows(), {{rows, cols}});
  cert.support = pattern_from_rows(p.rows(), p.cols(), t);
  cert.missing = missing_cells_of(p, t);
  cert.height = rectangle_height(rect, r);
  cert.deficit = cert.height - static_cast<int>(cert.missing.size());
  const int inside = count_in(p, rows, cols);
  const int bound = r * (pc(rows) + pc(cols) - r);
  std::ostringstream s;
  s << "|Omega ∩ (I x J)| = " << inside << " > " << bound << " = r(|I|+|J|-r) for I x J = " << rect_text(rect)
    << ", r = " << r;
  cert.inequality = s.str();
  return cert;
}

struct BlockChoice {
  int overflow;
  Mask cols;
};

// For fixed rows I the column set maximizing |Omega ∩ (I x J)| - r(|I| + |J| - r) over
// |J| >= r + 1: every column with positive excess |omega_j ∩ I| - r, padded with the largest
// remaining excesses.
BlockChoice best_columns(const Pattern& p, Mask rows, int r) {
  const int size = pc(rows);
  std::vector<std::pair<int, int>> excess;  // (excess, column)
  excess.reserve(static_cast<std::size_t>(p.cols()));
  for (int j = 0; j < p.cols(); ++j) excess.emplace_back(pc(p.col_mask(j) & rows) - r, j);
  std::stable_sort(excess.begin(), excess.end(), [](auto a, auto b) { return a.first > b.first; });
  int sum = 0;
  Mask cols = 0;
  for (std::size_t k = 0; k < excess.size(); ++k) {
    if (static_cast<int>(k) >= r + 1 && excess[k].first <= 0) break;
    sum += excess[k].first;
    cols |= Mask{1} << excess[k].second;
  }
  return {sum - r * (size - r), cols};
}

struct BlockHit {
  int overflow = 0;
  Mask rows = 0;
  Mask cols = 0;
};

BlockHit scan_rows(const Pattern& p, int r, int cap) {
  BlockHit best{0, 0, 0};
  const int m = p.rows();
  auto consider = [&](Mask rows) {
    BlockChoice c = best_columns(p, rows, r);
    if (c.overflow > best.overflow) best = {c.overflow, rows, c.cols};
    return c.overflow;
  };
  if (m <= cap) {
    for (Mask rows = 1; rows <= low_bits(m); ++rows) {
      if (pc(rows) > r) consider(rows);
    }
    return best;
  }
  // Local search by single-row flips from several starts.
  std::vector<Mask> starts{low_bits(m)};
  for (int j = 0; j < p.cols(); ++j)
    if (pc(p.col_mask(j)) > r) starts.push_back(p.col_mask(j));
  for (Mask rows : starts) {
    int value = consider(rows);
    for (bool improved = true; improved;) {
      improved = false;
      Mask best_next = rows;
      int best_value = value;
      for (int i = 0; i < m; ++i) {
        const Mask next = rows ^ (Mask{1} << i);
        if (pc(next) <= r) continue;
        const int v = consider(next);
        if (v > best_value) {
          best_value = v;
          best_next = next;
        }
      }
      if (best_next != rows) {
        rows = best_next;
        value = best_value;
        improved = true;
      }
    }
  }
  return best;
}

void validate_rect(const Rectangle& rect, const MatroidContext& ctx, std::size_t index) {
  for (int i : rect.rows)
    if (i < 0 || i >= ctx.rows()) throw PreconditionError("block " + std::to_string(index + 1) + ": row out of range");
  for (int j : rect.cols)
    if (j < 0 || j >= ctx.cols()) throw PreconditionError("block " + std::to_string(index + 1) + ": column out of range");
  const Mask rows = indices_to_mask(rect.rows);
  const Mask cols = indices_to_mask(rect.cols);
  if (pc(rows) <= ctx.rank() || pc(cols) <= ctx.rank()) {
    throw PreconditionError("block " + std::to_string(index + 1) + " needs more than r rows and columns");
  }
}

// Rows and columns touched by (rows x cols) ∩ U for U given per row.
std::pair<int, int> overlap_shape(const std::vector<Mask>& u, Mask rows, Mask cols) {
  int overlap_rows = 0;
  Mask overlap_cols = 0;
  for (Mask rm = rows; rm != 0; rm &= rm - 1) {
    const Mask hit = u[static_cast<std::size_t>(std::countr_zero(rm))] & cols;
    if (hit != 0) {
      ++overlap_rows;
      overlap_cols |= hit;
    }
  }
  return {overlap_rows, pc(overlap_cols)};
}

}  // namespace

std::string to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::Block: return "Block";
    case CertificateKind::Asche: return "Asche";
    case CertificateKind::Height: return "Height";
    case CertificateKind::ClosedForm: return "ClosedForm";
  }
  return "Unknown";
}

int rectangle_height(const Rectangle& rect, int r) {
  return (static_cast<int>(rect.rows.size()) - r) * (static_cast<int>(rect.cols.size()) - r);
}

SlmfResult slmf_evaluate(const Pattern& p, const SlmfParams& params) {
  if (params.nu < 1 || params.r < 1 || params.r >= params.m) {
    throw RegimeError("SLMF parameters need nu >= 1 and 1 <= r < m");
  }
  if (p.rows() != params.m) throw RegimeError("SLMF parameter m does not match the pattern's row count");
  if (params.m > kMaxSlmfRows) {
    throw RegimeError("SLMF evaluation enumerates all row subsets and is limited to m <= " +
                      std::to_string(kMaxSlmfRows));
  }
  const int r = params.r;
  const Mask full = low_bits(params.m);
  SlmfResult result;
  for (Mask rows = 1; rows <= full; ++rows) {
    const int size = pc(rows);
    if (size <= r) continue;
    int lhs = 0;
    for (int j = 0; j < p.cols(); ++j) lhs += std::max(pc(p.col_mask(j) & rows) - r, 0);
    const int rhs = params.nu * (size - r);
    const bool ok = rows == full ? lhs == rhs : lhs <= rhs;
    if (!ok) {
      result.violation = mask_to_indices(rows);
      result.lhs = lhs;
      result.rhs = rhs;
      return result;
    }
    if (rows == full) {
      result.lhs = lhs;
      result.rhs = rhs;
    }
  }
  result.holds = true;
  return result;
}

bool slmf_necessary_check(const Pattern& p, const MatroidContext& ctx) {
  return slmf_check(p, {ctx.rank(), ctx.rank(), ctx.rows()});
}

std::optional<std::vector<IndexSet>> partition_slmf_search(const Pattern& p, const MatroidContext& ctx,
                                                           std::uint64_t node_budget, bool* budget_exhausted) {
  if (budget_exhausted) *budget_exhausted = false;
  if (!ctx.matches(p) || p.size() != ctx.rank_bound()) return std::nullopt;
  const int m = p.rows();
  const int r = ctx.rank();
  if (m > kMaxSlmfRows) {
    throw RegimeError("partition search enumerates all row subsets and is limited to m <= " +
                      std::to_string(kMaxSlmfRows));
  }
  const Mask full = low_bits(m);
  const int target = m - r;

  std::vector<int> active;  // columns with positive excess at I = [m]
  IndexSet idle;
  int total = 0;
  for (int j = 0; j < p.cols(); ++j) {
    const int e = p.col_count(j) - r;
    if (e > 0) {
      active.push_back(j);
      total += e;
    } else {
      idle.push_back(j);
    }
  }
  if (total != r * target) return std::nullopt;
  std::stable_sort(active.begin(), active.end(), [&](int a, int b) { return p.col_count(a) > p.col_count(b); });

  std::vector<Mask> subsets;
  for (Mask rows = 1; rows <= full; ++rows)
    if (pc(rows) > r) subsets.push_back(rows);

  // lhs[g][s]: excess sum of group g over subset s; bound[s] = |I| - r.
  std::vector<std::vector<std::uint8_t>> lhs(static_cast<std::size_t>(r),
                                             std::vector<std::uint8_t>(subsets.size(), 0));
  std::vector<std::vector<std::uint8_t>> contrib(active.size(), std::vector<std::uint8_t>(subsets.size(), 0));
  for (std::size_t a = 0; a < active.size(); ++a)
    for (std::size_t s = 0; s < subsets.size(); ++s)
      contrib[a][s] = static_cast<std::uint8_t>(std::max(pc(p.col_mask(active[a]) & subsets[s]) - r, 0));
  std::vector<std::uint8_t> bound(subsets.size());
  for (std::size_t s = 0; s < subsets.size(); ++s) bound[s] = static_cast<std::uint8_t>(pc(subsets[s]) - r);

  std::vector<int> group_of(active.size(), -1);
  std::vector<int> group_total(static_cast<std::size_t>(r), 0);
  std::uint64_t nodes = 0;
  bool exhausted = false;

  auto fits = [&](std::size_t a, int g) {
    if (group_total[static_cast<std::size_t>(g)] + (p.col_count(active[a]) - r) > target) return false;
    const auto& row = lhs[static_cast<std::size_t>(g)];
    for (std::size_t s = 0; s < subsets.size(); ++s)
      if (row[s] + contrib[a][s] > bound[s]) return false;
    return true;
  };
  auto apply = [&](std::size_t a, int g, int sign) {
    auto& row = lhs[static_cast<std::size_t>(g)];
    for (std::size_t s = 0; s < subsets.size(); ++s) row[s] = static_cast<std::uint8_t>(row[s] + sign * contrib[a][s]);
    group_total[static_cast<std::size_t>(g)] += sign * (p.col_count(active[a]) - r);
  };

  auto search = [&](auto&& self, std::size_t a, int used) -> bool {
    if (++nodes > node_budget) {
      exhausted = true;
      return false;
    }
    if (a == active.size()) {
      return std::all_of(group_total.begin(), group_total.end(), [&](int t) { return t == target; });
    }
    const int limit = std::min(used + 1, r);
    for (int g = 0; g < limit; ++g) {
      if (!fits(a, g)) continue;
      apply(a, g, +1);
      group_of[a] = g;
      if (self(self, a + 1, std::max(used, g + 1))) return true;
      apply(a, g, -1);
      if (exhausted) return false;
    }
    return false;
  };

  if (!search(search, 0, 0)) {
    if (budget_exhausted) *budget_exhausted = exhausted;
    return std::nullopt;
  }
  std::vector<IndexSet> groups(static_cast<std::size_t>(r));
  for (std::size_t a = 0; a < active.size(); ++a) groups[static_cast<std::size_t>(group_of[a])].push_back(active[a]);
  for (int j : idle) groups[0].push_back(j);
  for (IndexSet& g : groups) std::sort(g.begin(), g.end());
  return groups;
}

std::optional<DependenceCertificate> block_dependence_scan(const Pattern& p, const MatroidContext& ctx, int cap) {
  if (!ctx.matches(p)) throw std::invalid_argument("pattern dimensions do not match the matroid context");
  const int r = ctx.rank();
  if (p.rows() <= p.cols()) {
    BlockHit hit = scan_rows(p, r, cap);
    if (hit.overflow <= 0) return std::nullopt;
    return rectangle_certificate(p, hit.rows, hit.cols, r, CertificateKind::Block);
  }
  BlockHit hit = scan_rows(transpose(p), r, cap);
  if (hit.overflow <= 0) return std::nullopt;
  return rectangle_certificate(p, hit.cols, hit.rows, r, CertificateKind::Block);
}

bool satisfies_chain_condition(const BlockFamily& fam, int r) {
  int m = 0;
  for (const Rectangle& b : fam.blocks)
    for (int i : b.rows) m = std::max(m, i + 1);
  std::vector<Mask> u(static_cast<std::size_t>(m), 0);
  for (std::size_t a = 0; a < fam.blocks.size(); ++a) {
    const Mask rows = indices_to_mask(fam.blocks[a].rows);
    const Mask cols = indices_to_mask(fam.blocks[a].cols);
    if (a > 0) {
      auto [orows, ocols] = overlap_shape(u, rows, cols);
      if (std::min(orows, ocols) > r) return false;
    }
    for (int i : fam.blocks[a].rows) u[static_cast<std::size_t>(i)] |= cols;
  }
  return true;
}

std::optional<DependenceCertificate> asche_verify(const Pattern& p, const BlockFamily& fam, const MatroidContext& ctx) {
  if (!ctx.matches(p)) throw std::invalid_argument("pattern dimensions do not match the matroid context");
  if (fam.blocks.empty()) throw PreconditionError("block family is empty");
  for (std::size_t a = 0; a < fam.blocks.size(); ++a) validate_rect(fam.blocks[a], ctx, a);
  const int r = ctx.rank();
  if (!satisfies_chain_condition(fam, r)) throw PreconditionError("block family violates the chain condition");

  std::vector<std::pair<Mask, Mask>> masks;
  int block_sum = 0;
  for (const Rectangle& b : fam.blocks) {
    masks.emplace_back(indices_to_mask(b.rows), indices_to_mask(b.cols));
    block_sum += rectangle_height(b, r);
  }
  const std::vector<Mask> t = union_rows(p.rows(), masks);
  std::vector<Cell> missing = missing_cells_of(p, t);
  const int lhs = static_cast<int>(missing.size());
  if (lhs >= block_sum) return std::nullopt;

  DependenceCertificate cert;
  cert.kind = CertificateKind::Asche;
  cert.family = fam;
  for (Rectangle& b : cert.family.blocks) {
    std::sort(b.rows.begin(), b.rows.end());
    b.rows.erase(std::unique(b.rows.begin(), b.rows.end()), b.rows.end());
    std::sort(b.cols.begin(), b.cols.end());
    b.cols.erase(std::unique(b.cols.begin(), b.cols.end()), b.cols.end());
  }
  cert.support = pattern_from_rows(p.rows(), p.cols(), t);
  cert.missing = std::move(missing);
  cert.height = block_sum;
  cert.deficit = block_sum - lhs;
  std::ostringstream s;
  s << "|T \\ Omega| = " << lhs << " < " << block_sum << " = sum_a (|I_a|-r)(|J_a|-r) over " << fam.blocks.size()
    << " block(s):";
  for (const Rectangle& b : cert.family.blocks) s << " " << rect_text(b);
  s << ", r = " << r;
  cert.inequality = s.str();
  return cert;
}

namespace {

struct Candidate {
  Mask rows;
  Mask cols;
  int weight;   // (|I| - r)(|J| - r)
  int missing;  // |(I x J) \ Omega|
};

std::vector<Candidate> asche_candidates(const Pattern& p, int r) {
  std::set<std::pair<Mask, Mask>> seen;
  std::vector<Candidate> out;
  auto add = [&](Mask rows, Mask cols) {
    if (pc(rows) <= r || pc(cols) <= r) return;
    if (!seen.emplace(rows, cols).second) return;
    const int weight = (pc(rows) - r) * (pc(cols) - r);
    const int missing = pc(rows) * pc(cols) - count_in(p, rows, cols);
    // Blocks far below break-even never pay for themselves.
    if (missing - weight > r + 1) return;
    out.push_back({rows, cols, weight, missing});
  };
  // For each row subset, the column prefixes ordered by excess (and symmetrically).
  auto from_side = [&](const Pattern& q, bool transposed) {
    const int m = q.rows();
    auto visit = [&](Mask rows) {
      std::vector<std::pair<int, int>> excess;
      for (int j = 0; j < q.cols(); ++j) excess.emplace_back(pc(q.col_mask(j) & rows) - r, j);
      std::stable_sort(excess.begin(), excess.end(), [](auto a, auto b) { return a.first > b.first; });
      Mask cols = 0;
      for (std::size_t k = 0; k < excess.size(); ++k) {
        if (excess[k].first < 0 && static_cast<int>(k) >= r + 1) break;
        cols |= Mask{1} << excess[k].second;
        if (static_cast<int>(k) >= r) transposed ? add(cols, rows) : add(rows, cols);
      }
    };
    if (m <= 14) {
      for (Mask rows = 1; rows <= low_bits(m); ++rows)
        if (pc(rows) > r) visit(rows);
    } else {
      // Unions of up to three row-neighbourhoods of columns stand in for exhaustive enumeration.
      std::vector<Mask> bases;
      for (int j = 0; j < q.cols(); ++j)
        if (pc(q.col_mask(j)) > r) bases.push_back(q.col_mask(j));
      visit(low_bits(m));
      for (std::size_t a = 0; a < bases.size(); ++a) {
        visit(bases[a]);
        for (std::size_t b = a + 1; b < bases.size(); ++b) visit(bases[a] | bases[b]);
      }
    }
  };
  from_side(p, false);
  from_side(transpose(p), true);
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    const int ga = a.weight - a.missing;
    const int gb = b.weight - b.missing;
    if (ga != gb) return ga > gb;
    return pc(a.rows) * pc(a.cols) < pc(b.rows) * pc(b.cols);
  });
  return out;
}

}  // namespace

std::optional<DependenceCertificate> asche_search(const Pattern& p, const MatroidContext& ctx,
                                                  const AscheSearchOptions& opts) {
  if (!ctx.matches(p)) throw std::invalid_argument("pattern dimensions do not match the matroid context");
  const int r = ctx.rank();
  const int m = p.rows();
  if (auto scan = block_dependence_scan(p, ctx)) return asche_verify(p, scan->family, ctx);
  const std::vector<Candidate> cands = asche_candidates(p, r);
  std::uint64_t nodes = 0;

  auto finish = [&](const std::vector<std::size_t>& chosen) -> std::optional<DependenceCertificate> {
    BlockFamily fam;
    for (std::size_t k : chosen) fam.blocks.push_back(rect_from_masks(cands[k].rows, cands[k].cols));
    return asche_verify(p, fam, ctx);
  };

  // Seeds: the densest single blocks first; each is extended greedily by the block that adds
  // the most weight net of newly uncovered missing cells.
  std::vector<std::size_t> seeds;
  for (std::size_t k = 0; k < cands.size() && static_cast<int>(seeds.size()) < opts.seeds; ++k) seeds.push_back(k);

  for (std::size_t seed : seeds) {
    std::vector<std::size_t> chosen{seed};
    std::vector<Mask> u(static_cast<std::size_t>(m), 0);
    auto absorb = [&](const Candidate& c) {
      for (Mask rm = c.rows; rm != 0; rm &= rm - 1) u[static_cast<std::size_t>(std::countr_zero(rm))] |= c.cols;
    };
    absorb(cands[seed]);
    int deficit = cands[seed].weight - cands[seed].missing;
    while (deficit <= 0 && static_cast<int>(chosen.size()) < opts.max_blocks) {
      int best_gain = -1;
      std::size_t best = cands.size();
      for (std::size_t k = 0; k < cands.size(); ++k) {
        if (++nodes > opts.node_budget) return std::nullopt;
        const Candidate& c = cands[k];
        if (c.weight <= best_gain) continue;
        auto [orows, ocols] = overlap_shape(u, c.rows, c.cols);
        if (std::min(orows, ocols) > r) continue;
        int fresh_missing = 0;
        for (Mask rm = c.rows; rm != 0; rm &= rm - 1) {
          const int i = std::countr_zero(rm);
          fresh_missing += pc(c.cols & ~u[static_cast<std::size_t>(i)] & ~p.row_mask(i));
        }
        const int gain = c.weight - fresh_missing;
        if (gain > best_gain) {
          best_gain = gain;
          best = k;
        }
      }
      if (best == cands.size() || best_gain < 0) break;
      chosen.push_back(best);
      absorb(cands[best]);
      deficit += best_gain;
    }
    if (deficit > 0) return finish(chosen);
  }
  return std::nullopt;
}

std::optional<DependenceCertificate> height_criterion_check(const Pattern& p, const Pattern& t, int height) {
  if (t.rows() != p.rows() || t.cols() != p.cols()) throw std::invalid_argument("T must lie in the same grid as Omega");
  std::vector<Mask> t_rows(static_cast<std::size_t>(t.rows()));
  for (int i = 0; i < t.rows(); ++i) t_rows[static_cast<std::size_t>(i)] = t.row_mask(i);
  std::vector<Cell> missing = missing_cells_of(p, t_rows);
  const int lhs = static_cast<int>(missing.size());
  if (height <= lhs) return std::nullopt;
  DependenceCertificate cert;
  cert.kind = CertificateKind::Height;
  cert.support = t;
  cert.missing = std::move(missing);
  cert.height = height;
  cert.deficit = height - lhs;
  std::ostringstream s;
  s << "height(I_T) = " << height << " > " << lhs << " = |T \\ Omega| for |T| = " << t.size();
  cert.inequality = s.str();
  return cert;
}

std::optional<DependenceCertificate> height_criterion_check(const Pattern& p, const Rectangle& t,
                                                            const MatroidContext& ctx) {
  if (!ctx.matches(p)) throw std::invalid_argument("pattern dimensions do not match the matroid context");
  validate_rect(t, ctx, 0);
  auto cert = height_criterion_check(p, Pattern::rectangle(p.rows(), p.cols(), t.rows, t.cols),
                                     rectangle_height(t, ctx.rank()));
  if (cert) {
    cert->family.blocks.push_back(t);
    cert->inequality += ", T = " + rect_text(t);
  }
  return cert;
}

ClosedFormResult closed_form_r1(const Pattern& p) {
  const int m = p.rows();
  const int total = m + p.cols();
  std::vector<int> parent(static_cast<std::size_t>(total));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(total));
  for (const Cell& c : p.cells()) {
    const int a = c.row;
    const int b = m + c.col;
    if (find(a) != find(b)) {
      parent[static_cast<std::size_t>(find(a))] = find(b);
      adj[static_cast<std::size_t>(a)].push_back(b);
      adj[static_cast<std::size_t>(b)].push_back(a);
      continue;
    }
    // (a, b) closes a cycle with the forest path from a to b.
    std::vector<int> prev(static_cast<std::size_t>(total), -1);
    std::vector<int> queue{a};
    prev[static_cast<std::size_t>(a)] = a;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      for (int w : adj[static_cast<std::size_t>(queue[h])]) {
        if (prev[static_cast<std::size_t>(w)] >= 0) continue;
        prev[static_cast<std::size_t>(w)] = queue[h];
        queue.push_back(w);
      }
    }
    std::vector<Cell> cycle{c};
    Mask rows = Mask{1} << c.row;
    Mask cols = Mask{1} << c.col;
    for (int v = b; v != a; v = prev[static_cast<std::size_t>(v)]) {
      const int u = prev[static_cast<std::size_t>(v)];
      const int row = std::min(u, v);
      const int col = std::max(u, v) - m;
      cycle.push_back({row, col});
      rows |= Mask{1} << row;
      cols |= Mask{1} << col;
    }
    DependenceCertificate cert = rectangle_certificate(p, rows, cols, 1, CertificateKind::ClosedForm);
    // A cycle is itself a circuit; its ideal is principal, so height 1 > 0 missing cells.
    cert.support = Pattern::from_cells(p.rows(), p.cols(), cycle);
    cert.missing.clear();
    cert.height = 1;
    cert.deficit = 1;
    cert.inequality = "height(I_T) = 1 > 0 = |T \\ Omega| for T a cycle of length " + std::to_string(cycle.size()) +
                      " in the bipartite graph";
    return {false, std::move(cert)};
  }
  return {true, std::nullopt};
}

ClosedFormResult closed_form_corank1(const Pattern& p) {
  if (std::min(p.rows(), p.cols()) < 2) throw RegimeError("corank-1 closed form needs min(m, n) >= 2");
  if (p.rows() > p.cols()) {
    ClosedFormResult t = closed_form_corank1(transpose(p));
    if (t.certificate) {
      const Rectangle rect = t.certificate->family.blocks.front();
      t.certificate = rectangle_certificate(p, indices_to_mask(rect.cols), indices_to_mask(rect.rows),
                                            p.cols() - 1, CertificateKind::ClosedForm);
    }
    return t;
  }
  const int m = p.rows();
  Mask full_cols = 0;
  for (int j = 0; j < p.cols() && pc(full_cols) < m; ++j)
    if (p.col_count(j) == m) full_cols |= Mask{1} << j;
  if (pc(full_cols) < m) return {true, std::nullopt};
  return {false, rectangle_certificate(p, low_bits(m), full_cols, m - 1, CertificateKind::ClosedForm)};
}

ClosedFormResult closed_form_corank2(const Pattern& p, const MatroidContext& ctx) {
  if (!ctx.matches(p)) throw std::invalid_argument("pattern dimensions do not match the matroid context");
  const int r = ctx.rank();
  if (r != std::min(p.rows(), p.cols()) - 2) throw RegimeError("corank-2 closed form needs r = min(m, n) - 2");
  Mask rows = low_bits(p.rows());
  Mask cols = low_bits(p.cols());
  for (bool changed = true; changed;) {
    changed = false;
    for (Mask cm = cols; cm != 0; cm &= cm - 1) {
      const int j = std::countr_zero(cm);
      if (pc(p.col_mask(j) & rows) <= r) {
        cols &= ~(Mask{1} << j);
        changed = true;
      }
    }
    for (Mask rm = rows; rm != 0; rm &= rm - 1) {
      const int i = std::countr_zero(rm);
      if (pc(p.row_mask(i) & cols) <= r) {
        rows &= ~(Mask{1} << i);
        changed = true;
      }
    }
  }
  if (std::min(pc(rows), pc(cols)) <= r) return {true, std::nullopt};
  const int kept = count_in(p, rows, cols);
  if (kept <= r * (pc(rows) + pc(cols) - r)) return {true, std::nullopt};
  return {false, rectangle_certificate(p, rows, cols, r, CertificateKind::ClosedForm)};
}

std::optional<ClosedFormResult> closed_form(const Pattern& p, const MatroidContext& ctx) {
  const int lo = std::min(ctx.rows(), ctx.cols());
  if (ctx.rank() == 1) return closed_form_r1(p);
  if (ctx.rank() == lo - 1) return closed_form_corank1(p);
  if (ctx.rank() == lo - 2) return closed_form_corank2(p, ctx);
  return std::nullopt;
}

}  // namespace detmat
