#pragma once

#include "sclab/common.hpp"
#include "sclab/slopes.hpp"

#include <map>
#include <string>
#include <vector>

namespace sclab::experiments {

/// Everything needed to reproduce a run. Serializes to JSON; the hash of
/// the canonical serialization is stamped into every output.
struct RunManifest {
  std::string experiment;
  std::vector<double> h_ladder;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware default
  std::string out_dir = "results";
  std::map<std::string, double> params;  // numeric overrides

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
  std::uint64_t hash() const;
};

struct CheckOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  std::string id;
  bool pass = false;
  std::vector<CheckOutcome> checks;
  std::string csv;          // plot-ready ladder data
  std::string summary_json; // includes the manifest hash
  double seconds = 0.0;
};

struct ExperimentInfo {
  std::string id;
  std::string description;
  int criterion = 0;  // acceptance criterion this experiment belongs to
};

const std::vector<ExperimentInfo>& catalog();
bool known_experiment(const std::string& id);
RunManifest default_manifest(const std::string& id);

/// Runs one experiment and writes <out_dir>/<id>/{results.csv, summary.json}.
ExperimentResult run_experiment(const RunManifest& manifest);

/// Validation of a manifest: returns a list of schema errors (empty = valid).
std::vector<std::string> validate_manifest(const std::string& json_text);

}  // namespace sclab::experiments
