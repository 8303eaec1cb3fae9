#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace topdown {

inline constexpr const char* kExperimentKinds[] = {"grow",      "grow-real", "opt",          "jz-sweep",       "agnostic-sweep",
                                                   "hard",      "realizable", "round-check", "verify-impurity"};

/// Parsed experiment configuration. `params` keeps every kind-specific
/// field (with defaults filled in) and is echoed verbatim into the bundle.
struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 1;
  std::string out;  // output directory; empty means "do not write"
  int threads = 1;
  bool inject_failure = false;
  nlohmann::ordered_json params;

  /// Validates the kind, fills defaults and checks referenced files exist.
  /// Throws FormatError with a diagnostic.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

struct CheckOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ResultBundle {
  nlohmann::ordered_json summary;              // config echo, seed, version, results, checks
  std::map<std::string, std::string> files;    // relative path -> contents
  std::map<std::string, std::string> plotdata; // relative path (under plotdata/) -> CSV
  std::vector<CheckOutcome> checks;
  bool all_pass() const;
};

/// Dispatches to the named experiment. Invariant failures are reported in
/// the bundle, not thrown.
ResultBundle run(const ExperimentConfig& cfg);

/// Writes summary.json, every file and the plot data under `dir`.
void write_bundle(const ResultBundle& b, const std::string& dir);
/// Writes only the plot-data CSVs (dir/plotdata/...).
void emit_plotdata(const ResultBundle& b, const std::string& dir);

const char* version_string();

}  // namespace topdown
