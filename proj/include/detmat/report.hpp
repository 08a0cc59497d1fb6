#pragma once

#include "detmat/completability.hpp"
#include "detmat/criteria.hpp"
#include "detmat/oracle.hpp"
#include "detmat/pattern.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace detmat {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

/// "fnv1a64:" followed by 16 hex digits of the 64-bit FNV-1a hash of to_text(p).
std::string pattern_digest(const Pattern& p);

struct ReportSettings {
  std::uint64_t seed = kDefaultSeed;
  int oracle_trials = 3;
  std::uint64_t q = 11;
  int fiber_trials = 100;
  std::uint64_t fiber_budget = kDefaultFiberBudget;
};

struct AnalysisReport {
  std::string source;  // file name as given, may be empty
  Pattern pattern{1, 1};
  int rank = 1;
  ReportSettings settings;
  std::optional<SlmfResult> slmf;
  OracleVerdict independence;
  /// Dependence certificate for the input pattern, when one was found.
  std::optional<DependenceCertificate> certificate;
  CompletabilityVerdict verdict;
  /// Wall time in seconds; left out of the output unless set.
  std::optional<double> seconds;
};

/// Line-delimited "key: value" rendering. Keys are stable across releases of schema v1.
std::string render_text(const AnalysisReport& report);
/// JSON sidecar, schema v1 (see docs/report_schema_v1.md).
std::string render_json(const AnalysisReport& report);

}  // namespace detmat
