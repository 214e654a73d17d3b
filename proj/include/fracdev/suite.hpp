#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

namespace fracdev::suite {

struct SuiteConfig {
  std::vector<std::string> criteria;  // empty = all, otherwise a name filter
  double paths_scale = 1.0;           // scales Monte Carlo path counts (smoke runs)
  std::uint64_t seed = 20240607;
  int threads = 0;
  double moment_bias = 0.0;  // fault injection for harness self-tests
  bool verbose = true;       // one line per criterion on stdout
};

struct CriterionResult {
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string summary;
  nlohmann::json details;
};

struct SuiteReport {
  std::vector<CriterionResult> results;
  bool all_passed = true;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

const std::vector<std::string>& criterion_names();

SuiteReport run_suite(const SuiteConfig& config);

}  // namespace fracdev::suite
