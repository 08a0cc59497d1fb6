// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
#include "support.hpp"

#include "detmat/bases.hpp"
#include "detmat/completability.hpp"
#include "detmat/criteria.hpp"
#include "detmat/oracle.hpp"
#include "detmat/polynomial.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

using namespace detmat;
using testsupport::load;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "failed: " << what << "; ";
    pass = pass && ok;
  }
};

int failures = 0;

void criterion(int id, double limit_seconds, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_seconds) o.require(false, "took longer than " + std::to_string(limit_seconds) + " s");
  if (!o.pass) ++failures;
  std::printf("%s %2d  %.2fs  %s\n", o.pass ? "PASS" : "FAIL", id, secs, o.detail.str().c_str());
  std::fflush(stdout);
}

constexpr std::uint64_t kSeed = 20240601;

void rank_formula(Outcome& o) {
  int contexts = 0;
  for (int m = 2; m <= 6; ++m)
    for (int n = 2; n <= 6; ++n)
      for (int r = 1; r < std::min(m, n); ++r) {
        const int got = matroid_rank(Pattern::full(m, n), MatroidContext(m, n, r)).rank_estimate;
        o.require(got == r * (m + n - r), std::to_string(m) + "x" + std::to_string(n) + " r=" + std::to_string(r));
        ++contexts;
      }
  o.detail << contexts << " contexts";
}

void five_by_five_example(Outcome& o) {
  const Pattern p = load("slmf-but-not-base.pat");
  const MatroidContext ctx(5, 5, 2);
  o.require(slmf_check(p, {2, 2, 5}), "slmf(nu=2)");
  o.require(!is_independent(p, ctx), "oracle dependent");
  const auto cert = asche_verify(p, BlockFamily{{{{0, 1, 2}, {0, 1, 2}}, {{2, 3, 4}, {2, 3, 4}}}}, ctx);
  o.require(cert.has_value(), "asche certificate");
  if (cert) {
    o.require(cert->missing == std::vector<Cell>{{2, 2}}, "B = {(3,3)}");
    o.detail << cert->inequality;
  }
}

void antidiagonal_nine(Outcome& o) {
  const Pattern p = load("antidiag-9x9.pat");
  const MatroidContext ctx(9, 9, 4);
  o.require(is_base(p, ctx), "oracle base");
  bool exhausted = false;
  const auto part = partition_slmf_search(p, ctx, 50'000'000, &exhausted);
  o.require(!part.has_value(), "partition none");
  o.require(!exhausted, "partition search finished within budget");
  o.detail << "base, no partition (exhaustive)";
}

void dependence_examples(Outcome& o) {
  struct Case {
    const char* file;
    int r;
    std::size_t missing;
    int height;
  };
  for (const Case& c : {Case{"ladder-dependent-9x9.pat", 4, 4, 5}, Case{"block-family-12x12.pat", 5, 3, 4}}) {
    const Pattern p = load(c.file);
    const MatroidContext ctx = MatroidContext::for_pattern(p, c.r);
    auto cert = block_dependence_scan(p, ctx);
    if (!cert) cert = asche_search(p, ctx);
    o.require(cert.has_value(), std::string(c.file) + " certificate");
    if (cert) {
      o.require(cert->missing.size() == c.missing && cert->height == c.height,
                std::string(c.file) + " inequality " + std::to_string(c.missing) + " < " + std::to_string(c.height));
      o.detail << c.file << ": " << cert->missing.size() << " < " << cert->height << "; ";
    }
    o.require(!is_independent(p, ctx), std::string(c.file) + " oracle dependent");
  }
}

void closed_forms(Outcome& o) {
  int checked = 0;
  int disagreements = 0;
  auto compare = [&](const Pattern& p, const MatroidContext& ctx) {
    const auto cf = closed_form(p, ctx);
    const bool oracle = matroid_rank(p, ctx).rank_estimate == p.size();
    if (!cf || cf->independent != oracle) ++disagreements;
    ++checked;
  };
  for (int r = 1; r <= 3; ++r) {
    const MatroidContext ctx(4, 4, r);
    for (std::uint64_t mask = 0; mask < (1u << 16); ++mask) compare(testsupport::from_mask(4, 4, mask), ctx);
  }
  std::mt19937_64 rng(kSeed);
  for (int r : {1, 4, 3}) {
    const MatroidContext ctx(5, 6, r);
    for (int k = 0; k < 200; ++k) {
      const int size = std::clamp(ctx.rank_bound() - 3 + static_cast<int>(rng() % 7), 1, 30);
      compare(testsupport::random_pattern(5, 6, size, rng), ctx);
    }
  }
  o.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
  o.detail << checked << " patterns, " << disagreements << " disagreements";
}

void polynomial_fixture(Outcome& o) {
  const PolynomialSpec spec = read_polynomial_file(testsupport::fixture("codim2-4x4-circuit.poly"));
  VanishingOptions vo;
  vo.points_per_prime = 10;
  vo.seed = kSeed;
  o.require(vo.primes.size() == 2, "two primes");
  o.require(polynomial_vanishes_on_variety(spec, MatroidContext(4, 4, 2), vo), "vanishes");
  std::map<Cell, std::int64_t> values;
  for (auto [i, j] : {std::pair{1, 2}, {4, 1}}) values[{i - 1, j - 1}] = 0;
  for (auto [i, j] : {std::pair{1, 3}, {1, 4}, {2, 1}, {2, 4}, {3, 1}, {3, 2}, {4, 2}, {4, 3}}) values[{i - 1, j - 1}] = 1;
  for (auto [i, j] : {std::pair{2, 3}, {3, 4}}) values[{i - 1, j - 1}] = 2;
  o.require(specialize_univariate(spec, values, {0, 0}) == std::vector<std::int64_t>{1, -3, 3}, "3z^2 - 3z + 1");
  FiberOptions fo;
  fo.q = 7;
  fo.trials = 200;
  fo.seed = kSeed;
  const FiberCountResult f = fiber_count(load("nonunique-5x6.pat"), MatroidContext(5, 6, 3), fo);
  o.require(f.fraction_not(1) >= 0.30, "5x6 count != 1 in >= 30%");
  o.detail << "3z^2-3z+1 reproduced; 5x6 count!=1 fraction " << f.fraction_not(1);
}

void codim2_squares(Outcome& o) {
  const MatroidContext ctx(4, 4, 2);
  std::set<std::uint64_t> classes;
  for (std::uint64_t mask = 0; mask < (1u << 16); ++mask) {
    if (std::popcount(mask) != 12) continue;
    const Pattern p = testsupport::from_mask(4, 4, mask);
    const std::uint64_t canon = testsupport::canonical_mask(p);
    if (classes.count(canon)) continue;
    if (is_base(p, ctx)) classes.insert(canon);
  }
  int unique = 0;
  int exceptional = 0;
  FiberOptions fo;
  fo.q = 11;
  fo.trials = 100;
  fo.seed = kSeed;
  for (std::uint64_t canon : classes) {
    const Pattern p = testsupport::from_mask(4, 4, canon);
    const CompletabilityVerdict v = unique_corank2_square(p);
    const FiberCountResult f = fiber_count(p, ctx, fo);
    if (v.uniqueness == Uniqueness::Unique) {
      ++unique;
      o.require(f.fraction_with(1) >= 0.95, "unique class " + to_text(p));
    } else {
      ++exceptional;
      o.require(f.fraction_not(1) >= 0.30, "exceptional class " + to_text(p));
      o.detail << "exceptional count!=1 fraction " << f.fraction_not(1) << "; ";
    }
  }
  o.require(exceptional == 1, "exactly one exceptional class");
  o.detail << classes.size() << " base classes (" << unique << " unique, " << exceptional << " exceptional)";
}

void stitching(Outcome& o) {
  std::mt19937_64 rng(kSeed);
  int disagreements = 0;
  int bases = 0;
  int unique = 0;
  PipelineOptions po;
  po.oracle.seed = kSeed;
  po.fiber.seed = kSeed;
  for (int k = 0; k < 50; ++k) {
    const Pattern p = testsupport::random_pattern(4, 4, 11 + k % 3, rng);
    const CompletabilityVerdict a = verdict_pipeline(p, MatroidContext(4, 4, 2), po);
    const CompletabilityVerdict b = verdict_pipeline(stitch(p), MatroidContext(5, 5, 3), po);
    if (a.status != b.status || a.is_base != b.is_base) ++disagreements;
    bases += a.is_base.value_or(false);
    unique += a.status == CompletionStatus::UniquelyCompletable;
  }
  o.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
  o.detail << "50 patterns (" << bases << " bases, " << unique << " unique), " << disagreements << " disagreements";
}

void path_families(Outcome& o) {
  const std::map<std::tuple<int, int, int>, std::size_t> expected{{{2, 2, 1}, 2}, {{3, 3, 1}, 6}, {{3, 3, 2}, 3}};
  for (const auto& [key, count] : expected) {
    const auto [m, n, r] = key;
    const auto fams = enumerate_families(MatroidContext(m, n, r)).families;
    o.require(fams.size() == count, "count for " + std::to_string(m) + "x" + std::to_string(n));
    o.require(fams.size() == testsupport::brute_families(m, n, r).size(), "brute-force count");
  }
  FiberOptions fo;
  fo.q = 11;
  fo.trials = 100;
  fo.seed = kSeed;
  int families = 0;
  int ladders = 0;
  for (auto [m, n, r] : {std::tuple{3, 3, 1}, {3, 3, 2}, {4, 4, 2}, {5, 5, 2}}) {
    const MatroidContext ctx(m, n, r);
    for (const PathFamily& f : enumerate_families(ctx).families) {
      ++families;
      const Pattern p = family_to_pattern(f);
      o.require(is_base(p, ctx), "family is a base");
      if (!ladder_unique_check(f)) continue;
      ++ladders;
      o.require(greedy_closure(p, ctx).complete(), "ladder greedy-closes: " + to_text(p));
      o.require(fiber_count(p, ctx, fo).fraction_with(1) >= 0.95, "ladder fiber count 1: " + to_text(p));
    }
  }
  o.detail << families << " families, " << ladders << " ladders";
}

void omega_example(Outcome& o) {
  PipelineOptions po;
  po.fiber_when_proved = true;
  po.oracle.seed = kSeed;
  po.fiber.seed = kSeed;
  const MatroidContext ctx(4, 4, 2);
  for (int k = 1; k <= 4; ++k) {
    const std::string name = "antidiag-omega" + std::to_string(k) + "-4x4.pat";
    const CompletabilityVerdict v = verdict_pipeline(load(name), ctx, po);
    o.require(v.fiber.has_value(), name + " fiber statistics");
    const bool unique = v.status == CompletionStatus::UniquelyCompletable;
    if (k <= 3) {
      o.require(unique, name + " uniquely completable");
      o.require(v.fiber && v.fiber->fraction_with(1) >= 0.95, name + " count 1 in >= 95%");
    } else {
      o.require(!unique && v.finitely_completable(), name + " finite, not unique");
      o.require(v.fiber && v.fiber->fraction_not(1) >= 0.30, name + " count != 1 in >= 30%");
    }
    if (v.fiber) o.detail << "omega" << k << " count1=" << v.fiber->fraction_with(1) << " ";
  }
}

void property_suites(Outcome& o) {
  const testsupport::PropertyTally suites[] = {
      testsupport::monotonicity_suite(300, kSeed), testsupport::exchange_suite(300, kSeed + 1),
      testsupport::invariance_suite(300, kSeed + 2), testsupport::certificate_suite(600, kSeed + 3)};
  const char* names[] = {"monotonicity", "exchange", "invariance", "certificates"};
  int instances = 0;
  for (int k = 0; k < 4; ++k) {
    instances += suites[k].instances;
    o.require(suites[k].violations == 0, std::string(names[k]) + ": " + suites[k].first_violation);
    o.detail << names[k] << "=" << suites[k].instances << " ";
  }
  o.require(instances >= 1000, "at least 1000 instances");
  o.detail << "total " << instances << ", violations 0 required";
}

}  // namespace

int main() {
  criterion(1, 5, rank_formula);
  criterion(2, 1, five_by_five_example);
  criterion(3, 30, antidiagonal_nine);
  criterion(4, 20, dependence_examples);
  criterion(5, 120, closed_forms);
  criterion(6, 30, polynomial_fixture);
  criterion(7, 300, codim2_squares);
  criterion(8, 120, stitching);
  criterion(9, 180, path_families);
  criterion(10, 60, omega_example);
  criterion(11, 300, property_suites);
  return failures == 0 ? 0 : 1;
}
