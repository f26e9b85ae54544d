#include "dss/experiment_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dss/numeric.hpp"

namespace dss {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  // Shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  return buf;
}

void ExperimentReport::add_param(const std::string& key, const std::string& value) {
  params.emplace_back(key, value);
}

void ExperimentReport::add_param(const std::string& key, double value) {
  params.emplace_back(key, format_double(value));
}

void ExperimentReport::add_param(const std::string& key, int value) {
  params.emplace_back(key, std::to_string(value));
}

nlohmann::ordered_json ExperimentReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["experiment"] = experiment;
  nlohmann::ordered_json p = nlohmann::ordered_json::object();
  for (const auto& [k, v] : params) p[k] = v;
  j["params"] = p;
  j["seed"] = seed;
  j["rows"] = nlohmann::ordered_json::array();
  for (const ExperimentRow& r : rows) {
    nlohmann::ordered_json row;
    row["n"] = r.n;
    // Serialized as canonical strings: JSON has no inf, and strings keep the
    // CSV and JSON mirrors byte-consistent.
    row["mean_bits"] = format_double(r.mean_bits);
    row["median_bits"] = format_double(r.median_bits);
    row["min_bits"] = format_double(r.min_bits);
    row["max_bits"] = format_double(r.max_bits);
    row["trials"] = r.trials;
    j["rows"].push_back(row);
  }
  return j;
}

std::string ExperimentReport::to_csv() const {
  std::string out = "n,mean_bits,median_bits,min_bits,max_bits,trials\n";
  for (const ExperimentRow& r : rows) {
    out += std::to_string(r.n);
    out += ',';
    out += format_double(r.mean_bits);
    out += ',';
    out += format_double(r.median_bits);
    out += ',';
    out += format_double(r.min_bits);
    out += ',';
    out += format_double(r.max_bits);
    out += ',';
    out += std::to_string(r.trials);
    out += '\n';
  }
  return out;
}

ExperimentRow summarize_row(int n, const std::vector<double>& samples) {
  if (samples.empty()) throw std::invalid_argument("summarize_row: no samples");
  KahanSum mean;
  for (double v : samples) mean.add(v);
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  double median = m % 2 == 0 ? 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]) : sorted[m / 2];
  return ExperimentRow{n, mean.value() / static_cast<double>(m), median, sorted.front(),
                       sorted.back(), static_cast<int>(m)};
}

}  // namespace dss
