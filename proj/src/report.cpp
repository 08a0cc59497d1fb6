#include "detmat/report.hpp"

#include "json.hpp"

#include <cstdio>
#include <iomanip>
#include <sstream>

namespace detmat {

namespace {

using Json = nlohmann::ordered_json;

std::string cell_text(const Cell& c) { return "(" + std::to_string(c.row + 1) + "," + std::to_string(c.col + 1) + ")"; }

std::string cells_text(const std::vector<Cell>& cells) {
  std::string out = "{";
  for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? "," : "") + cell_text(cells[k]);
  return out + "}";
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

std::string number_text(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

std::string histogram_text(const FiberCountResult& f) {
  std::string out;
  for (auto [count, trials] : f.counts) out += (out.empty() ? "" : " ") + std::to_string(count) + ":" + std::to_string(trials);
  return out;
}

Json cell_json(const Cell& c) { return Json::array({c.row + 1, c.col + 1}); }

Json index_json(const IndexSet& idx) {
  Json out = Json::array();
  for (int i : idx) out.push_back(i + 1);
  return out;
}

Json certificate_json(const DependenceCertificate& c) {
  Json blocks = Json::array();
  for (const Rectangle& b : c.family.blocks) blocks.push_back({{"rows", index_json(b.rows)}, {"cols", index_json(b.cols)}});
  Json missing = Json::array();
  for (const Cell& m : c.missing) missing.push_back(cell_json(m));
  return {{"kind", to_string(c.kind)}, {"blocks", blocks},      {"missing", missing},
          {"height", c.height},        {"deficit", c.deficit}, {"inequality", c.inequality}};
}

}  // namespace

std::string pattern_digest(const Pattern& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_text(p)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

std::string render_text(const AnalysisReport& rep) {
  std::ostringstream out;
  auto kv = [&](const std::string& k, const std::string& v) { out << k << ": " << v << "\n"; };
  const Pattern& p = rep.pattern;
  const int bound = rep.rank * (p.rows() + p.cols() - rep.rank);
  kv("schema", "detmat-report/" + std::to_string(kReportSchemaVersion));
  kv("tool_version", kToolVersion);
  if (!rep.source.empty()) kv("input.source", rep.source);
  kv("input.digest", pattern_digest(p));
  kv("context.m", std::to_string(p.rows()));
  kv("context.n", std::to_string(p.cols()));
  kv("context.r", std::to_string(rep.rank));
  kv("pattern.observed", std::to_string(p.size()));
  kv("pattern.rank_bound", std::to_string(bound));
  kv("settings.seed", std::to_string(rep.settings.seed));
  kv("settings.oracle_trials", std::to_string(rep.settings.oracle_trials));
  kv("settings.q", std::to_string(rep.settings.q));
  kv("settings.fiber_trials", std::to_string(rep.settings.fiber_trials));
  kv("settings.fiber_budget", std::to_string(rep.settings.fiber_budget));
  if (rep.slmf) {
    kv("slmf.nu", std::to_string(rep.rank));
    kv("slmf.holds", bool_text(rep.slmf->holds));
    if (rep.slmf->violation) kv("slmf.violation", format_index_set(*rep.slmf->violation));
  }
  kv("oracle.rank", std::to_string(rep.independence.rank_estimate));
  kv("oracle.independent", bool_text(rep.independence.rank_estimate == p.size()));
  kv("oracle.base", bool_text(rep.independence.rank_estimate == p.size() && p.size() == bound));
  kv("oracle.points", std::to_string(rep.independence.trials));
  kv("oracle.failure_bound", number_text(rep.independence.failure_bound));
  if (rep.certificate) {
    kv("certificate.kind", to_string(rep.certificate->kind));
    kv("certificate.height", std::to_string(rep.certificate->height));
    kv("certificate.missing", cells_text(rep.certificate->missing));
    kv("certificate.deficit", std::to_string(rep.certificate->deficit));
    kv("certificate.inequality", rep.certificate->inequality);
  }
  const CompletabilityVerdict& v = rep.verdict;
  if (v.closure) {
    kv("closure.complete", bool_text(v.closure->complete()));
    kv("closure.determined", std::to_string(v.closure->order.size()));
    kv("closure.residual", cells_text(v.closure->residual));
  }
  if (v.fiber) {
    kv("fiber.q", std::to_string(v.fiber->q));
    kv("fiber.trials", std::to_string(v.fiber->trials));
    kv("fiber.histogram", histogram_text(*v.fiber));
    kv("fiber.rejected", std::to_string(v.fiber->rejected));
    kv("fiber.low_confidence", bool_text(v.fiber->low_confidence));
  }
  kv("verdict.status", to_string(v.status));
  kv("verdict.confidence", to_string(v.confidence));
  kv("verdict.uniqueness", to_string(v.uniqueness));
  kv("verdict.uniqueness_confidence", to_string(v.uniqueness_confidence));
  kv("verdict.base", v.is_base ? bool_text(*v.is_base) : "unknown");
  for (std::size_t k = 0; k < v.evidence.size(); ++k) {
    std::string line = v.evidence[k].rule;
    for (const auto& [key, value] : v.evidence[k].params) line += " " + key + "=" + value;
    kv("evidence." + std::to_string(k + 1), line);
  }
  if (rep.seconds) kv("timing.seconds", number_text(*rep.seconds));
  return out.str();
}

std::string render_json(const AnalysisReport& rep) {
  const Pattern& p = rep.pattern;
  const int bound = rep.rank * (p.rows() + p.cols() - rep.rank);
  Json j;
  j["schema"] = "detmat-report";
  j["schema_version"] = kReportSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["input"] = {{"source", rep.source}, {"digest", pattern_digest(p)}};
  j["context"] = {{"m", p.rows()}, {"n", p.cols()}, {"r", rep.rank}};
  j["pattern"] = {{"observed", p.size()}, {"rank_bound", bound}};
  j["settings"] = {{"seed", rep.settings.seed},
                   {"oracle_trials", rep.settings.oracle_trials},
                   {"q", rep.settings.q},
                   {"fiber_trials", rep.settings.fiber_trials},
                   {"fiber_budget", rep.settings.fiber_budget}};
  if (rep.slmf) {
    j["slmf"] = {{"nu", rep.rank}, {"holds", rep.slmf->holds}};
    if (rep.slmf->violation) j["slmf"]["violation"] = index_json(*rep.slmf->violation);
  }
  j["oracle"] = {{"rank", rep.independence.rank_estimate},
                 {"independent", rep.independence.rank_estimate == p.size()},
                 {"base", rep.independence.rank_estimate == p.size() && p.size() == bound},
                 {"points", rep.independence.trials},
                 {"failure_bound", rep.independence.failure_bound}};
  if (rep.certificate) j["certificate"] = certificate_json(*rep.certificate);
  const CompletabilityVerdict& v = rep.verdict;
  if (v.closure) {
    Json steps = Json::array();
    for (const ClosureStep& s : v.closure->order)
      steps.push_back({{"cell", cell_json(s.cell)}, {"rows", index_json(s.rows)}, {"cols", index_json(s.cols)}});
    Json residual = Json::array();
    for (const Cell& c : v.closure->residual) residual.push_back(cell_json(c));
    j["closure"] = {{"complete", v.closure->complete()}, {"steps", steps}, {"residual", residual}};
  }
  if (v.fiber) {
    Json hist = Json::object();
    for (auto [count, trials] : v.fiber->counts) hist[std::to_string(count)] = trials;
    j["fiber"] = {{"q", v.fiber->q},
                  {"trials", v.fiber->trials},
                  {"histogram", hist},
                  {"rejected", v.fiber->rejected},
                  {"low_confidence", v.fiber->low_confidence}};
  }
  Json evidence = Json::array();
  for (const Evidence& e : v.evidence) {
    Json params = Json::object();
    for (const auto& [key, value] : e.params) params[key] = value;
    evidence.push_back({{"rule", e.rule}, {"params", params}});
  }
  j["verdict"] = {{"status", to_string(v.status)},
                  {"confidence", to_string(v.confidence)},
                  {"uniqueness", to_string(v.uniqueness)},
                  {"uniqueness_confidence", to_string(v.uniqueness_confidence)},
                  {"base", v.is_base ? Json(*v.is_base) : Json(nullptr)},
                  {"evidence", evidence}};
  if (rep.seconds) j["timing"] = {{"seconds", *rep.seconds}};
  return j.dump(2) + "\n";
}

}  // namespace detmat
