#include "detmat/cli.hpp"

#include "detmat/bases.hpp"
#include "detmat/completability.hpp"
#include "detmat/criteria.hpp"
#include "detmat/errors.hpp"
#include "detmat/oracle.hpp"
#include "detmat/pattern.hpp"
#include "detmat/polynomial.hpp"
#include "detmat/report.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#ifndef DETMAT_FIXTURE_DIR
#define DETMAT_FIXTURE_DIR "fixtures"
#endif

namespace detmat {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

constexpr std::uint64_t kScanStream = 0x7363616e;

struct CommonFlags {
  int rank = 0;
  int trials = 3;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t q = 11;
  int fiber_trials = 100;
  std::uint64_t budget = kDefaultFiberBudget;
};

void add_common(CLI::App& cmd, CommonFlags& f, bool need_rank) {
  auto* r = cmd.add_option("-r,--rank", f.rank, "Rank bound r");
  if (need_rank) r->required();
  r->check(CLI::PositiveNumber);
  cmd.add_option("--trials", f.trials, "Oracle random points")->check(CLI::PositiveNumber);
  cmd.add_option("--seed", f.seed, "Random seed");
  cmd.add_option("--q", f.q, "Prime for fiber counting");
  cmd.add_option("--fiber-trials", f.fiber_trials, "Fiber counting trials")->check(CLI::PositiveNumber);
  cmd.add_option("--budget", f.budget, "Search node budget");
}

PipelineOptions pipeline_options(const CommonFlags& f) {
  PipelineOptions o;
  o.oracle.seed = f.seed;
  o.oracle.trials = f.trials;
  o.fiber.seed = f.seed;
  o.fiber.q = f.q;
  o.fiber.trials = f.fiber_trials;
  o.fiber.node_budget = f.budget;
  return o;
}

OracleOptions oracle_options(const CommonFlags& f) {
  OracleOptions o;
  o.seed = f.seed;
  o.trials = f.trials;
  return o;
}

std::optional<DependenceCertificate> find_certificate(const Pattern& p, const MatroidContext& ctx,
                                                      const AscheSearchOptions& opts) {
  if (auto cf = closed_form(p, ctx); cf && !cf->independent) return cf->certificate;
  if (auto b = block_dependence_scan(p, ctx)) return b;
  return asche_search(p, ctx, opts);
}

int cmd_analyze(const std::string& file, const CommonFlags& f, const std::string& json_path, bool timing,
                bool no_fiber, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Pattern p = read_pattern_file(file);
  const MatroidContext ctx = MatroidContext::for_pattern(p, f.rank);
  PipelineOptions opts = pipeline_options(f);
  opts.run_fiber = !no_fiber;

  AnalysisReport rep;
  rep.source = fs::path(file).filename().string();
  rep.pattern = p;
  rep.rank = f.rank;
  rep.settings = {f.seed, f.trials, f.q, f.fiber_trials, f.budget};
  if (p.rows() <= kMaxSlmfRows) rep.slmf = slmf_evaluate(p, {f.rank, f.rank, p.rows()});
  rep.independence = matroid_rank(p, ctx, oracle_options(f));
  rep.verdict = verdict_pipeline(p, ctx, opts);
  if (rep.independence.rank_estimate < p.size()) {
    rep.certificate = rep.verdict.certificate ? rep.verdict.certificate : find_certificate(p, ctx, opts.asche);
  }
  if (timing) rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << render_text(rep);
  if (!json_path.empty()) {
    std::ofstream js(json_path, std::ios::binary);
    if (!js) throw std::runtime_error("cannot write " + json_path);
    js << render_json(rep);
  }
  return kExitOk;
}

int cmd_gen_bases(int m, int n, const CommonFlags& f, std::size_t count, bool diagonal, bool sample,
                  const std::string& out_dir, std::ostream& out) {
  const MatroidContext ctx(m, n, f.rank);
  std::vector<PathFamily> families;
  bool truncated = false;
  if (sample) {
    for (std::size_t k = 0; k < count; ++k) families.push_back(sample_family(ctx, f.seed + k));
  } else {
    FamilyEnumeration e = enumerate_families(ctx, count);
    families = std::move(e.families);
    truncated = e.truncated;
  }
  if (!out_dir.empty()) fs::create_directories(out_dir);
  const OracleOptions oracle = oracle_options(f);
  out << "context: " << m << "x" << n << " r=" << f.rank << (diagonal ? " diagonal" : " anti-diagonal") << "\n";
  int verified = 0;
  for (std::size_t k = 0; k < families.size(); ++k) {
    const PathFamily& fam = families[k];
    const Pattern pat = diagonal ? diagonal_variant(fam) : family_to_pattern(fam);
    const bool base = is_base(pat, ctx, oracle);
    std::ostringstream name;
    name << "family-" << std::setw(4) << std::setfill('0') << (k + 1) << ".pat";
    out << name.str() << ":";
    for (const std::string& s : fam.paths) out << " " << s;
    out << " base=" << (base ? "true" : "false") << " ladder=" << (is_ladder(pat) ? "true" : "false") << "\n";
    if (!base) continue;
    ++verified;
    if (!out_dir.empty()) write_pattern_file(fs::path(out_dir) / name.str(), pat);
  }
  out << "families: " << families.size() << "\n";
  out << "verified_bases: " << verified << "\n";
  if (sample) {
    out << "note: sampled with seeds " << f.seed << ".." << f.seed + count - 1 << "\n";
  } else if (truncated) {
    out << "note: truncated at " << count << " families\n";
  } else if (families.size() < count) {
    out << "note: requested " << count << ", all " << families.size() << " families emitted\n";
  }
  return verified == static_cast<int>(families.size()) ? kExitOk : kExitMismatch;
}

int cmd_conjecture_scan(int m, int n, const CommonFlags& f, int samples, int extra, std::ostream& out) {
  const MatroidContext ctx(m, n, f.rank);
  const int size = std::min(m * n, ctx.rank_bound() + extra);
  AscheSearchOptions asche;
  asche.node_budget = f.budget;
  const OracleOptions oracle = oracle_options(f);
  int dependent = 0;
  int explained = 0;
  std::map<std::string, int> by_kind;
  out << "context: " << m << "x" << n << " r=" << f.rank << " size=" << size << "\n";
  for (int s = 0; s < samples; ++s) {
    std::mt19937_64 rng = trial_stream(f.seed, kScanStream, static_cast<std::uint64_t>(s));
    std::vector<int> idx(static_cast<std::size_t>(m * n));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    Incidence inc = Incidence::Constant(m, n, false);
    for (int k = 0; k < size; ++k) inc(idx[static_cast<std::size_t>(k)] / n, idx[static_cast<std::size_t>(k)] % n) = true;
    const Pattern p(std::move(inc));
    const OracleVerdict v = matroid_rank(p, ctx, oracle);
    if (v.rank_estimate == p.size()) continue;
    ++dependent;
    std::optional<DependenceCertificate> cert = block_dependence_scan(p, ctx);
    if (!cert) cert = asche_search(p, ctx, asche);
    const std::string kind = cert ? to_string(cert->kind) : "none";
    if (cert) {
      ++explained;
      ++by_kind[kind];
    }
    out << "sample " << (s + 1) << ": rank=" << v.rank_estimate << " explained_by=" << kind << "\n";
  }
  out << "samples: " << samples << "\n";
  out << "dependent: " << dependent << "\n";
  out << "explained: " << explained << "\n";
  for (const auto& [kind, c] : by_kind) out << "explained." << kind << ": " << c << "\n";
  out << "unexplained: " << dependent - explained << "\n";
  out << "explained_fraction: "
      << (dependent == 0 ? std::string("n/a") : std::to_string(static_cast<double>(explained) / dependent)) << "\n";
  return kExitOk;
}

std::string verdict_field(const CompletabilityVerdict& v, const std::string& key) {
  if (key == "status") return to_string(v.status);
  if (key == "uniqueness") return to_string(v.uniqueness);
  if (key == "uniqueness_confidence") return to_string(v.uniqueness_confidence);
  return to_string(v.confidence);
}

// Returns mismatch descriptions, empty when the fixture matches.
std::vector<std::string> check_pattern_entry(const Json& entry, const fs::path& dir, std::uint64_t seed) {
  std::vector<std::string> bad;
  const Pattern p = read_pattern_file(dir / entry.at("file").get<std::string>());
  const int r = entry.at("r").get<int>();
  const MatroidContext ctx = MatroidContext::for_pattern(p, r);
  OracleOptions oracle;
  oracle.seed = seed;
  auto expect_eq = [&](const std::string& key, const auto& want, const auto& got) {
    if (!(want == got)) {
      std::ostringstream s;
      s << key << " expected " << want << ", got " << got;
      bad.push_back(s.str());
    }
  };

  if (entry.contains("fiber")) {
    const Json& fj = entry["fiber"];
    FiberOptions fo;
    fo.seed = seed;
    fo.q = fj.at("q").get<std::uint64_t>();
    fo.trials = fj.at("trials").get<int>();
    const FiberCountResult res = fiber_count(p, ctx, fo);
    if (fj.contains("min_not_one") && res.fraction_not(1) < fj["min_not_one"].get<double>()) {
      bad.push_back("fraction of count != 1 is " + std::to_string(res.fraction_not(1)) + ", below " +
                    std::to_string(fj["min_not_one"].get<double>()));
    }
    if (fj.contains("min_one") && res.fraction_with(1) < fj["min_one"].get<double>()) {
      bad.push_back("fraction of count == 1 is " + std::to_string(res.fraction_with(1)));
    }
  }
  if (!entry.contains("expect")) return bad;
  const Json& ex = entry["expect"];
  const OracleVerdict ov = matroid_rank(p, ctx, oracle);
  const bool independent = ov.rank_estimate == p.size();
  if (ex.contains("independent")) expect_eq("independent", ex["independent"].get<bool>(), independent);
  if (ex.contains("base")) {
    expect_eq("base", ex["base"].get<bool>(), independent && p.size() == ctx.rank_bound());
  }
  if (ex.contains("slmf")) expect_eq("slmf", ex["slmf"].get<bool>(), slmf_check(p, {r, r, p.rows()}));
  if (ex.contains("partition")) {
    expect_eq("partition", ex["partition"].get<bool>(), partition_slmf_search(p, ctx).has_value());
  }
  if (ex.contains("family")) expect_eq("family", ex["family"].get<bool>(), family_from_pattern(p, r).has_value());
  if (ex.contains("ladder")) expect_eq("ladder", ex["ladder"].get<bool>(), is_ladder(p));
  if (ex.contains("closure_complete")) {
    expect_eq("closure_complete", ex["closure_complete"].get<bool>(), greedy_closure(p, ctx).complete());
  }
  if (ex.contains("certificate") || ex.contains("deficit")) {
    const auto cert = find_certificate(p, ctx, {});
    if (!cert) {
      bad.push_back("no dependence certificate found");
    } else {
      if (ex.contains("certificate")) expect_eq("certificate", ex["certificate"].get<std::string>(), to_string(cert->kind));
      if (ex.contains("deficit")) expect_eq("deficit", ex["deficit"].get<int>(), cert->deficit);
    }
  }
  if (ex.contains("status") || ex.contains("uniqueness") || ex.contains("uniqueness_confidence")) {
    PipelineOptions po;
    po.oracle = oracle;
    po.fiber.seed = seed;
    po.run_fiber = entry.value("run_fiber", true);
    const CompletabilityVerdict v = verdict_pipeline(p, ctx, po);
    for (const char* key : {"status", "uniqueness", "uniqueness_confidence"}) {
      if (ex.contains(key)) expect_eq(key, ex[key].get<std::string>(), verdict_field(v, key));
    }
  }
  return bad;
}

std::vector<std::string> check_polynomial_entry(const Json& entry, const fs::path& dir, std::uint64_t seed) {
  std::vector<std::string> bad;
  const PolynomialSpec spec = read_polynomial_file(dir / entry.at("file").get<std::string>());
  const auto c = entry.at("context");
  const MatroidContext ctx(c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<int>());
  if (entry.contains("vanishes")) {
    VanishingOptions vo;
    vo.seed = seed;
    const bool v = polynomial_vanishes_on_variety(spec, ctx, vo);
    if (v != entry["vanishes"].get<bool>()) bad.push_back(std::string("vanishes expected ") + (v ? "false" : "true"));
  }
  if (entry.contains("specialization")) {
    const Json& sj = entry["specialization"];
    const Cell free_var{sj.at("free").at(0).get<int>() - 1, sj.at("free").at(1).get<int>() - 1};
    std::map<Cell, std::int64_t> values;
    for (const auto& [key, value] : sj.at("values").items()) {
      const auto comma = key.find(',');
      values[{std::stoi(key.substr(0, comma)) - 1, std::stoi(key.substr(comma + 1)) - 1}] = value.get<std::int64_t>();
    }
    const auto got = specialize_univariate(spec, values, free_var);
    const auto want = sj.at("coefficients").get<std::vector<std::int64_t>>();
    if (got != want) {
      std::string g;
      for (auto x : got) g += (g.empty() ? "" : ",") + std::to_string(x);
      bad.push_back("specialization coefficients are [" + g + "]");
    }
  }
  return bad;
}

int cmd_verify_fixtures(const std::string& dir_arg, std::uint64_t seed, std::ostream& out) {
  const fs::path dir = dir_arg.empty() ? fs::path(DETMAT_FIXTURE_DIR) : fs::path(dir_arg);
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("cannot open " + (dir / "manifest.json").string());
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("manifest.json: ") + e.what());
  }
  int failures = 0;
  int total = 0;
  auto run = [&](const Json& entry, auto&& check) {
    ++total;
    const std::string name = entry.value("name", entry.value("file", std::string("?")));
    std::vector<std::string> bad;
    try {
      bad = check(entry, dir, seed);
    } catch (const std::exception& e) {
      bad.push_back(e.what());
    }
    if (bad.empty()) {
      out << "PASS " << name << "\n";
      return;
    }
    ++failures;
    out << "FAIL " << name << ":";
    for (std::size_t k = 0; k < bad.size(); ++k) out << (k ? ";" : "") << " " << bad[k];
    out << "\n";
  };
  for (const Json& e : manifest.value("polynomials", Json::array())) run(e, check_polynomial_entry);
  for (const Json& e : manifest.value("patterns", Json::array())) run(e, check_pattern_entry);
  out << "fixtures: " << total << ", failed: " << failures << "\n";
  return failures == 0 ? kExitOk : kExitMismatch;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Independence, base and completability analysis for determinantal matroids", "detmat"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  CommonFlags analyze_flags;
  std::string analyze_file;
  std::string json_path;
  bool timing = false;
  bool no_fiber = false;
  auto* analyze = app.add_subcommand("analyze", "Run the verdict pipeline on a pattern file");
  analyze->add_option("file", analyze_file, "Pattern file")->required();
  add_common(*analyze, analyze_flags, true);
  analyze->add_option("--json", json_path, "Write the JSON sidecar here");
  analyze->add_flag("--timing", timing, "Include wall time in the report");
  analyze->add_flag("--no-fiber", no_fiber, "Skip fiber statistics");

  CommonFlags gen_flags;
  int gen_m = 0;
  int gen_n = 0;
  std::size_t gen_count = 10;
  bool diagonal = false;
  bool sample = false;
  std::string out_dir;
  auto* gen = app.add_subcommand("gen-bases", "Emit path-family bases");
  gen->add_option("m", gen_m, "Rows")->required()->check(CLI::Range(2, kMaxDimension));
  gen->add_option("n", gen_n, "Columns")->required()->check(CLI::Range(2, kMaxDimension));
  add_common(*gen, gen_flags, true);
  gen->add_option("--count", gen_count, "Number of families")->check(CLI::PositiveNumber);
  gen->add_flag("--diagonal", diagonal, "Reverse columns to get diagonal paths");
  gen->add_flag("--sample", sample, "Sample families at random instead of enumerating");
  gen->add_option("--out", out_dir, "Directory for pattern files");

  CommonFlags scan_flags;
  scan_flags.budget = AscheSearchOptions{}.node_budget;
  int scan_m = 0;
  int scan_n = 0;
  int samples = 100;
  int extra = 0;
  auto* scan = app.add_subcommand("conjecture-scan", "Tabulate certificates for random dependent patterns");
  scan->add_option("m", scan_m, "Rows")->required()->check(CLI::Range(2, kMaxDimension));
  scan->add_option("n", scan_n, "Columns")->required()->check(CLI::Range(2, kMaxDimension));
  add_common(*scan, scan_flags, true);
  scan->add_option("--samples", samples, "Random patterns to draw")->check(CLI::PositiveNumber);
  scan->add_option("--extra", extra, "Cells above the rank bound")->check(CLI::NonNegativeNumber);

  std::string fixture_dir;
  std::uint64_t verify_seed = kDefaultSeed;
  auto* verify = app.add_subcommand("verify-fixtures", "Check every fixture against manifest.json");
  verify->add_option("--fixtures", fixture_dir, "Fixture directory");
  verify->add_option("--seed", verify_seed, "Random seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFailure;
  }

  try {
    if (*analyze) return cmd_analyze(analyze_file, analyze_flags, json_path, timing, no_fiber, out);
    if (*gen) return cmd_gen_bases(gen_m, gen_n, gen_flags, gen_count, diagonal, sample, out_dir, out);
    if (*scan) return cmd_conjecture_scan(scan_m, scan_n, scan_flags, samples, extra, out);
    if (*verify) return cmd_verify_fixtures(fixture_dir, verify_seed, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const RegimeError& e) {
    err << "regime error: " << e.what() << "\n";
    return kExitRegime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace detmat
