#include "sclab/experiments.hpp"

namespace sclab::experiments {

// placeholder: catalog filled in as experiments land
const std::vector<ExperimentInfo>& catalog() {
  static const std::vector<ExperimentInfo> entries;
  return entries;
}

bool known_experiment(const std::string& id) {
  for (const auto& e : catalog())
    if (e.id == id) return true;
  return false;
}

std::string RunManifest::to_json() const { return "{}"; }
RunManifest RunManifest::from_json(const std::string&) { return {}; }
std::uint64_t RunManifest::hash() const { return 0; }
RunManifest default_manifest(const std::string&) { return {}; }
ExperimentResult run_experiment(const RunManifest&) { return {}; }
std::vector<std::string> validate_manifest(const std::string&) { return {}; }

}  // namespace sclab::experiments
