// Batch driver for the distributed source simulation toolkit. Every
// subcommand is deterministic given its flags and --seed; CSV/JSON outputs
// are byte-stable across re-runs and thread counts.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dss/common_information.hpp"
#include "dss/counterexample.hpp"
#include "dss/experiment_report.hpp"
#include "dss/info_measures.hpp"
#include "dss/numeric.hpp"
#include "dss/probability.hpp"
#include "dss/schemes.hpp"
#include "dss/soft_covering.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitCap = 3;

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return j;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + out_path);
  out << text;
}

void emit_report(const dss::ExperimentReport& report, const std::string& format,
                 const std::string& out_path) {
  if (format == "csv") {
    emit(report.to_csv(), out_path);
  } else {
    emit(report.to_json().dump(2) + "\n", out_path);
  }
}

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  if (out.empty()) throw std::invalid_argument("--n-list is empty");
  return out;
}

bool looks_like_dsbs(const dss::ProbabilityTable& t, double tol = 1e-12) {
  if (t.num_coords() != 2 || t.shape()[0] != 2 || t.shape()[1] != 2) return false;
  return std::abs(t.at(0) - t.at(3)) <= tol && std::abs(t.at(1) - t.at(2)) <= tol &&
         std::abs(t.at(0) + t.at(1) - 0.5) <= tol;
}

int cmd_info(const std::string& dist_file, const std::string& out_path) {
  dss::ProbabilityTable table = dss::ProbabilityTable::from_json(load_json(dist_file));
  nlohmann::ordered_json r;
  r["file"] = dist_file;
  r["shape"] = table.shape();
  r["entropy_bits"] = dss::entropy(table);
  if (table.num_coords() == 2) {
    r["mutual_information_bits"] = dss::mutual_information(table);
    r["maximal_correlation"] = dss::maximal_correlation(table);
    dss::CommonPartDecomposition gk = dss::gk_common_information(table);
    r["gk_components"] = gk.component_count();
    r["gk_component_masses"] = gk.k_dist.probs();
    r["gk_common_information_bits"] = gk.entropy_bits;
    if (looks_like_dsbs(table)) {
      double q = table.at(1) + table.at(2);
      r["dsbs_flip_prob"] = q;
      if (q <= 0.5) r["wyner_common_information_bits"] = dss::wyner_dsbs(q);
    }
  }
  emit(r.dump(2) + "\n", out_path);
  return 0;
}

nlohmann::ordered_json scalar_summary(const dss::ScalarApproximation& sa) {
  nlohmann::ordered_json j;
  j["sigma"] = sa.sigma.sigma;
  std::vector<int> signs(sa.sigma.signs.begin(), sa.sigma.signs.end());
  j["signs"] = signs;
  j["expected_tv"] = sa.expected_tv;
  j["tv_median"] = sa.tv_median;
  j["tv_max"] = sa.tv_max;
  return j;
}

int cmd_analyze_scheme(const std::string& scheme_file, double p, double q,
                       const std::string& out_path) {
  nlohmann::json sj = load_json(scheme_file);
  nlohmann::ordered_json r;
  r["file"] = scheme_file;
  r["p"] = p;
  r["q"] = q;
  if (sj.contains("f_by_a")) {
    dss::RandomizedScheme s = dss::RandomizedScheme::from_json(sj);
    r["kind"] = "randomized";
    r["n"] = s.n;
    double div = dss::simulation_divergence(s, p, q);
    r["simulation_divergence_bits"] = dss::format_double(div);
  } else {
    dss::DeterministicScheme s = dss::DeterministicScheme::from_json(sj);
    r["kind"] = "deterministic";
    r["n"] = s.n;
    double div = dss::simulation_divergence(s, p, q);
    double bound = dss::hamming_lower_bound(s, p, q);
    r["simulation_divergence_bits"] = dss::format_double(div);
    r["hamming_lower_bound_bits"] = dss::format_double(bound);
    r["bound_is_tight"] = std::isfinite(div) && std::abs(div - bound) <= 1e-9;
    auto f_perm = dss::is_signed_permutation(s.f);
    auto g_perm = dss::is_signed_permutation(s.g);
    r["f_signed_permutation"] = f_perm.has_value();
    r["g_signed_permutation"] = g_perm.has_value();
    dss::LevelProfile prof = dss::level_profile(s);
    r["w0_sum"] = prof.w0_sum;
    r["w1_deficit_sum"] = prof.w1_deficit_sum;
    nlohmann::ordered_json coords = nlohmann::ordered_json::array();
    for (const dss::CoordinateLevelProfile& c : prof.coords) {
      nlohmann::ordered_json cj;
      cj["w0_f"] = c.w0_f;
      cj["w1_f"] = c.w1_f;
      cj["dict_dist_f"] = c.dict_dist_f;
      cj["w0_g"] = c.w0_g;
      cj["w1_g"] = c.w1_g;
      cj["dict_dist_g"] = c.dict_dist_g;
      coords.push_back(cj);
    }
    r["level_profile"] = coords;
    r["f_scalar_approx"] = scalar_summary(
        dss::best_scalar_approximation(dss::side_kernel(s.f)));
    r["g_scalar_approx"] = scalar_summary(
        dss::best_scalar_approximation(dss::side_kernel(s.g)));
  }
  emit(r.dump(2) + "\n", out_path);
  return 0;
}

int cmd_soft_cover(const std::string& instance_file, const std::string& n_list_text,
                   int trials, std::uint64_t seed, int threads, std::size_t cap,
                   const std::string& format, const std::string& out_path) {
  dss::SoftCoveringInstance inst =
      dss::SoftCoveringInstance::from_json(load_json(instance_file));
  std::vector<int> n_list = parse_n_list(n_list_text);
  dss::ExperimentReport report =
      dss::covering_experiment(inst, n_list, trials, seed, threads, cap);
  report.add_param("instance", instance_file);
  report.add_param("rate_gap_bits", dss::rate_gap(inst));
  report.add_param("min_gamma_exponent", dss::min_gamma_exponent(inst));
  report.add_param("trials", trials);
  emit_report(report, format, out_path);
  return 0;
}

int cmd_hybrid(const std::string& instance_file, const std::string& n_list_text,
               int trials, std::uint64_t seed, int threads, std::size_t cap,
               const std::string& format, const std::string& out_path) {
  nlohmann::json j = load_json(instance_file);
  dss::HybridInstance inst = dss::HybridInstance::from_json(j);
  if (!j.contains("target")) {
    throw std::invalid_argument("hybrid instance file requires a \"target\" table");
  }
  dss::ProbabilityTable target = dss::ProbabilityTable::from_json(j.at("target"));
  std::vector<int> n_list = parse_n_list(n_list_text);
  dss::ExperimentReport report =
      dss::hybrid_experiment(inst, target, n_list, trials, seed, threads, cap);
  dss::HybridReduction red = dss::hybrid_reduction(inst);
  report.add_param("instance", instance_file);
  report.add_param("common_part_bits", red.common.entropy_bits);
  report.add_param("rate_gap_bits", dss::rate_gap(red.instance));
  report.add_param("trials", trials);
  emit_report(report, format, out_path);
  return 0;
}

int cmd_counterexample(int n, int block_len, double p, double delta, double q, double mu,
                       bool epsilon_variant, std::size_t cap, const std::string& format,
                       const std::string& out_path) {
  dss::BlockParityScheme scheme =
      epsilon_variant ? dss::build_epsilon_variant(n, block_len, p, q, mu)
                      : dss::build_scheme(n, block_len, p, delta);
  dss::BlockParityMetrics metrics = dss::exact_metrics(scheme, p, cap);
  dss::ExperimentReport report;
  report.experiment = "counterexample";
  report.seed = 0;
  report.add_param("variant", epsilon_variant ? "epsilon" : "delta");
  report.add_param("n", n);
  report.add_param("block_len", block_len);
  report.add_param("p", p);
  report.add_param("q", scheme.q);
  report.add_param("mu", scheme.mu);
  report.add_param("target_flip", metrics.target_flip);
  for (int i = 0; i < n; ++i) {
    report.add_param("flip_prob_" + std::to_string(i), metrics.flip_probs[i]);
  }
  double marg_max = 0.0;
  for (double d : metrics.decomposition.marginal_divs) marg_max = std::max(marg_max, d);
  report.add_param("max_marginal_divergence_bits", marg_max);
  report.add_param("scalar_tv", metrics.scalar_approx.expected_tv);
  report.rows.push_back(dss::ExperimentRow{n, metrics.divergence_bits,
                                           metrics.divergence_bits, metrics.divergence_bits,
                                           metrics.divergence_bits, 1});
  emit_report(report, format, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed source simulation toolkit"};
  app.require_subcommand(1);

  std::string dist_file, scheme_file, instance_file, out_path;
  std::string format = "json";
  std::string n_list_text = "2,4,6,8";
  double p = 0.1, q = 0.1, delta = 0.0, mu = 0.0;
  int n = 8, block_len = 4, trials = 100, threads = 1;
  std::uint64_t seed = 1;
  std::size_t cap_cells = dss::kCoveringSpaceCap;
  bool epsilon_variant = false;

  CLI::App* info = app.add_subcommand("info", "entropy / MI / correlation / common information of a table");
  info->add_option("dist", dist_file, "ProbabilityTable JSON file")->required();
  info->add_option("--out", out_path, "output path (stdout if omitted)");

  CLI::App* analyze = app.add_subcommand("analyze-scheme", "divergence and structure diagnostics of a scheme");
  analyze->add_option("--scheme", scheme_file)->required();
  analyze->add_option("--p", p, "source DSBS flip probability")->required();
  analyze->add_option("--q", q, "target DSBS flip probability")->required();
  analyze->add_option("--out", out_path);

  CLI::App* cover = app.add_subcommand("soft-cover", "seeded covering-divergence sweep");
  cover->add_option("--instance", instance_file)->required();
  cover->add_option("--n-list", n_list_text);
  cover->add_option("--trials", trials);
  cover->add_option("--seed", seed);
  cover->add_option("--threads", threads);
  cover->add_option("--cap-cells", cap_cells);
  cover->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  cover->add_option("--out", out_path);

  CLI::App* hybrid = app.add_subcommand("hybrid", "hybrid-scheme divergence sweep");
  hybrid->add_option("--instance", instance_file)->required();
  hybrid->add_option("--n-list", n_list_text);
  hybrid->add_option("--trials", trials);
  hybrid->add_option("--seed", seed);
  hybrid->add_option("--threads", threads);
  hybrid->add_option("--cap-cells", cap_cells);
  hybrid->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  hybrid->add_option("--out", out_path);

  CLI::App* counter = app.add_subcommand("counterexample", "block-parity construction metrics");
  counter->add_option("--n", n);
  counter->add_option("--block-len", block_len);
  counter->add_option("--p", p)->required();
  counter->add_option("--delta", delta, "target delta (delta variant)");
  counter->add_option("--q", q, "BSC parameter (epsilon variant)");
  counter->add_option("--mu", mu, "parity activation probability (epsilon variant)");
  counter->add_flag("--epsilon-variant", epsilon_variant);
  counter->add_option("--cap-cells", cap_cells);
  counter->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  counter->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (info->parsed()) return cmd_info(dist_file, out_path);
    if (analyze->parsed()) return cmd_analyze_scheme(scheme_file, p, q, out_path);
    if (cover->parsed()) {
      return cmd_soft_cover(instance_file, n_list_text, trials, seed, threads, cap_cells,
                            format, out_path);
    }
    if (hybrid->parsed()) {
      return cmd_hybrid(instance_file, n_list_text, trials, seed, threads, cap_cells,
                        format, out_path);
    }
    if (counter->parsed()) {
      return cmd_counterexample(n, block_len, p, delta, q, mu, epsilon_variant, cap_cells,
                                format, out_path);
    }
  } catch (const dss::CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << " (requested " << e.requested()
              << ", cap " << e.cap() << ")\n";
    return kExitCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
