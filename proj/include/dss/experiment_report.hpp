#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace dss {

// Canonical shortest-roundtrip decimal form; identical doubles always print
// identically, which is what makes re-runs byte-comparable.
std::string format_double(double v);

struct ExperimentRow {
  int n;
  double mean_bits;
  double median_bits;
  double min_bits;
  double max_bits;
  int trials;
};

// Seeded, reproducible record of a Monte-Carlo or sweep run. Params keep
// insertion order so serialization is stable.
struct ExperimentReport {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> params;
  std::uint64_t seed = 0;
  std::vector<ExperimentRow> rows;

  void add_param(const std::string& key, const std::string& value);
  void add_param(const std::string& key, double value);
  void add_param(const std::string& key, int value);

  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;
};

// Mean/median/min/max summary of one batch of divergence samples.
ExperimentRow summarize_row(int n, const std::vector<double>& samples);

}  // namespace dss
