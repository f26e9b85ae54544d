#include "dss/soft_covering.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "dss/info_measures.hpp"
#include "dss/rng.hpp"

namespace dss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t checked_power(std::size_t base, int n, std::size_t cap, const char* what) {
  double est = std::pow(static_cast<double>(base), n);
  if (est > static_cast<double>(cap)) {
    throw CapExceeded(std::string(what) + ": enumeration space exceeds cap",
                      static_cast<std::size_t>(est), cap);
  }
  std::size_t v = 1;
  for (int i = 0; i < n; ++i) v *= base;
  return v;
}

}  // namespace

SoftCoveringInstance::SoftCoveringInstance(ProbabilityTable u, ConditionalKernel w_given_u,
                                           ConditionalKernel x_given_uw)
    : p_u(std::move(u)),
      p_w_given_u(std::move(w_given_u)),
      p_x_given_uw(std::move(x_given_uw)) {
  if (p_u.num_coords() != 1) {
    throw std::invalid_argument("SoftCoveringInstance: p_u must be one-coordinate");
  }
  if (p_w_given_u.in_size() != p_u.shape()[0]) {
    throw std::invalid_argument("SoftCoveringInstance: p_w_given_u input size mismatch");
  }
  if (p_x_given_uw.in_size() != p_u.shape()[0] * p_w_given_u.out_size()) {
    throw std::invalid_argument(
        "SoftCoveringInstance: p_x_given_uw input must cover (u,w) pairs");
  }
}

ProbabilityTable SoftCoveringInstance::letter_joint() const {
  const int nu = u_size(), nw = w_size(), nx = x_size();
  std::vector<double> probs(static_cast<std::size_t>(nu) * nw * nx);
  std::size_t k = 0;
  for (int u = 0; u < nu; ++u) {
    for (int w = 0; w < nw; ++w) {
      double base = p_u.at(u) * p_w_given_u.at(u, w);
      for (int x = 0; x < nx; ++x) {
        probs[k++] = base * p_x_given_uw.at(u * nw + w, x);
      }
    }
  }
  return ProbabilityTable({nu, nw, nx}, std::move(probs));
}

ProbabilityTable SoftCoveringInstance::x_marginal() const {
  const int coord[] = {2};
  return letter_joint().marginal(coord);
}

nlohmann::ordered_json SoftCoveringInstance::to_json() const {
  nlohmann::ordered_json j;
  j["p_u"] = p_u.to_json();
  j["p_w_given_u"] = p_w_given_u.to_json();
  j["p_x_given_uw"] = p_x_given_uw.to_json();
  return j;
}

SoftCoveringInstance SoftCoveringInstance::from_json(const nlohmann::json& j) {
  return SoftCoveringInstance(ProbabilityTable::from_json(j.at("p_u")),
                              ConditionalKernel::from_json(j.at("p_w_given_u")),
                              ConditionalKernel::from_json(j.at("p_x_given_uw")));
}

double rate_gap(const SoftCoveringInstance& inst) {
  ProbabilityTable joint = inst.letter_joint();
  const int uw[] = {0, 1};
  const int x[] = {2};
  double h_u = entropy(inst.p_u);
  double i_x_uw =
      entropy(joint.marginal(x)) + entropy(joint.marginal(uw)) - entropy(joint);
  return h_u - i_x_uw;
}

Codebook sample_codebook(const SoftCoveringInstance& inst, int n, std::uint64_t seed,
                         std::size_t cap) {
  const std::size_t u_space =
      checked_power(static_cast<std::size_t>(inst.u_size()), n, cap, "sample_codebook");
  const int nu = inst.u_size(), nw = inst.w_size();
  Codebook cb{n, std::vector<std::uint32_t>(u_space)};
  for (std::size_t ui = 0; ui < u_space; ++ui) {
    SplitMix64 gen(seed_mix(seed, ui));
    std::uint32_t w_word = 0;
    std::size_t rest = ui;
    std::size_t place = u_space / nu;
    for (int i = 0; i < n; ++i) {
      int u = static_cast<int>(rest / place);
      rest %= place;
      place /= nu;
      double r = gen.next_unit();
      int w = nw - 1;
      double cdf = 0.0;
      for (int cand = 0; cand < nw; ++cand) {
        cdf += inst.p_w_given_u.at(u, cand);
        if (r < cdf) {
          w = cand;
          break;
        }
      }
      w_word = w_word * nw + static_cast<std::uint32_t>(w);
    }
    cb.rows[ui] = w_word;
  }
  return cb;
}

double covering_divergence(const SoftCoveringInstance& inst, const Codebook& cb,
                           const ProbabilityTable& target_letter, std::size_t cap) {
  if (target_letter.num_coords() != 1 || target_letter.shape()[0] != inst.x_size()) {
    throw std::invalid_argument("covering_divergence: target alphabet mismatch");
  }
  const int n = cb.n;
  const int nu = inst.u_size(), nw = inst.w_size(), nx = inst.x_size();
  const std::size_t u_space =
      checked_power(static_cast<std::size_t>(nu), n, cap, "covering_divergence");
  const std::size_t x_space =
      checked_power(static_cast<std::size_t>(nx), n, cap, "covering_divergence");
  if (cb.rows.size() != u_space) {
    throw std::invalid_argument("covering_divergence: codebook size mismatch");
  }

  // p(x^n) = sum_u p_U(u^n) prod_i p(x_i | u_i, w_i). The inner product
  // measure is expanded coordinate by coordinate.
  std::vector<double> p_out(x_space, 0.0);
  std::vector<double> buf_a(x_space), buf_b(x_space);
  std::vector<int> u_digits(n), w_digits(n);
  for (std::size_t ui = 0; ui < u_space; ++ui) {
    std::size_t rest = ui;
    for (int i = n - 1; i >= 0; --i) {
      u_digits[i] = static_cast<int>(rest % nu);
      rest /= nu;
    }
    std::uint32_t w_word = cb.rows[ui];
    for (int i = n - 1; i >= 0; --i) {
      w_digits[i] = static_cast<int>(w_word % nw);
      w_word /= nw;
    }
    double pu = 1.0;
    for (int i = 0; i < n; ++i) pu *= inst.p_u.at(u_digits[i]);
    if (pu == 0.0) continue;

    buf_a[0] = pu;
    std::size_t cur = 1;
    double* src = buf_a.data();
    double* dst = buf_b.data();
    for (int i = 0; i < n; ++i) {
      const int row = u_digits[i] * nw + w_digits[i];
      std::size_t k = 0;
      for (std::size_t c = 0; c < cur; ++c) {
        const double base = src[c];
        for (int x = 0; x < nx; ++x) {
          dst[k++] = base * inst.p_x_given_uw.at(row, x);
        }
      }
      cur *= nx;
      std::swap(src, dst);
    }
    for (std::size_t xi = 0; xi < x_space; ++xi) p_out[xi] += src[xi];
  }

  // Direct divergence against the product target.
  KahanSum div;
  std::vector<int> x_digits(n);
  for (std::size_t xi = 0; xi < x_space; ++xi) {
    double pv = p_out[xi];
    if (pv <= 0.0) continue;
    std::size_t rest = xi;
    double lt = 0.0;
    bool zero = false;
    for (int i = n - 1; i >= 0; --i) {
      double t = target_letter.at(rest % nx);
      rest /= nx;
      if (t == 0.0) {
        zero = true;
        break;
      }
      lt += std::log2(t);
    }
    if (zero) return kInf;
    div.add(pv * (std::log2(pv) - lt));
  }
  return div.value();
}

double covering_divergence(const SoftCoveringInstance& inst, const Codebook& cb,
                           std::size_t cap) {
  return covering_divergence(inst, cb, inst.x_marginal(), cap);
}

double gamma_exponent(const SoftCoveringInstance& inst, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::domain_error("gamma_exponent: gamma must be in (0, 1)");
  }
  ProbabilityTable joint = inst.letter_joint();
  ProbabilityTable px = inst.x_marginal();
  const int nw = inst.w_size();
  KahanSum e;
  std::vector<int> sym(3);
  for (std::size_t flat = 0; flat < joint.size(); ++flat) {
    double v = joint.at(flat);
    if (v == 0.0) continue;
    joint.decode(flat, sym);
    double z = inst.p_u.at(sym[0]) * inst.p_x_given_uw.at(sym[0] * nw + sym[1], sym[2]) /
               px.at(sym[2]);
    e.add(v * std::pow(z, gamma));
  }
  return std::log2(e.value());
}

std::vector<double> gamma_exponent_grid() {
  std::vector<double> grid(64);
  const double lo = std::log(1e-3), hi = std::log(1.0 - 1e-3);
  for (int i = 0; i < 64; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * i / 63.0);
  }
  return grid;
}

double min_gamma_exponent(const SoftCoveringInstance& inst) {
  double best = kInf;
  for (double g : gamma_exponent_grid()) {
    best = std::min(best, gamma_exponent(inst, g));
  }
  return best;
}

ExperimentReport covering_experiment(const SoftCoveringInstance& inst,
                                     const ProbabilityTable& target_letter,
                                     const std::vector<int>& n_list, int trials,
                                     std::uint64_t master_seed, int threads,
                                     std::size_t cap) {
  if (trials < 1) throw std::invalid_argument("covering_experiment: trials must be >= 1");
  ExperimentReport report;
  report.experiment = "soft-cover";
  report.seed = master_seed;
  for (int n : n_list) {
    std::vector<double> divs(trials);
    // Per-trial seeds are fixed up front; threads only split the work, so
    // the reduction in trial order is schedule independent.
    auto run_range = [&](int lo, int hi) {
      for (int t = lo; t < hi; ++t) {
        Codebook cb = sample_codebook(inst, n, seed_mix(master_seed, n, t), cap);
        divs[t] = covering_divergence(inst, cb, target_letter, cap);
      }
    };
    int workers = std::max(1, threads);
    if (workers == 1) {
      run_range(0, trials);
    } else {
      std::vector<std::thread> pool;
      int chunk = (trials + workers - 1) / workers;
      for (int wkr = 0; wkr < workers; ++wkr) {
        int lo = wkr * chunk, hi = std::min(trials, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(run_range, lo, hi);
      }
      for (std::thread& th : pool) th.join();
    }
    report.rows.push_back(summarize_row(n, divs));
  }
  return report;
}

ExperimentReport covering_experiment(const SoftCoveringInstance& inst,
                                     const std::vector<int>& n_list, int trials,
                                     std::uint64_t master_seed, int threads,
                                     std::size_t cap) {
  return covering_experiment(inst, inst.x_marginal(), n_list, trials, master_seed,
                             threads, cap);
}

HybridInstance::HybridInstance(ProbabilityTable uv, ConditionalKernel w_given_k,
                               ConditionalKernel x_given_uw, ConditionalKernel y_given_vw)
    : p_uv(std::move(uv)),
      p_w_given_k(std::move(w_given_k)),
      p_x_given_uw(std::move(x_given_uw)),
      p_y_given_vw(std::move(y_given_vw)) {
  if (p_uv.num_coords() != 2) {
    throw std::invalid_argument("HybridInstance: p_uv must be a pair joint");
  }
  const int nw = p_w_given_k.out_size();
  if (p_x_given_uw.in_size() != p_uv.shape()[0] * nw) {
    throw std::invalid_argument("HybridInstance: p_x_given_uw input must cover (u,w)");
  }
  if (p_y_given_vw.in_size() != p_uv.shape()[1] * nw) {
    throw std::invalid_argument("HybridInstance: p_y_given_vw input must cover (v,w)");
  }
}

nlohmann::ordered_json HybridInstance::to_json() const {
  nlohmann::ordered_json j;
  j["p_uv"] = p_uv.to_json();
  j["p_w_given_k"] = p_w_given_k.to_json();
  j["p_x_given_uw"] = p_x_given_uw.to_json();
  j["p_y_given_vw"] = p_y_given_vw.to_json();
  return j;
}

HybridInstance HybridInstance::from_json(const nlohmann::json& j) {
  return HybridInstance(ProbabilityTable::from_json(j.at("p_uv")),
                        ConditionalKernel::from_json(j.at("p_w_given_k")),
                        ConditionalKernel::from_json(j.at("p_x_given_uw")),
                        ConditionalKernel::from_json(j.at("p_y_given_vw")));
}

HybridReduction hybrid_reduction(const HybridInstance& h) {
  CommonPartDecomposition common = gk_common_information(h.p_uv);
  if (common.component_count() < 2) {
    throw std::invalid_argument(
        "hybrid_reduction: source has zero Gacs-Korner common part");
  }
  const int nk = common.component_count();
  if (h.p_w_given_k.in_size() != nk) {
    throw std::invalid_argument(
        "hybrid_reduction: p_w_given_k input size must equal the component count");
  }
  const int nu = h.p_uv.shape()[0], nv = h.p_uv.shape()[1];
  const int nw = h.p_w_given_k.out_size();
  const int nx = h.p_x_given_uw.out_size(), ny = h.p_y_given_vw.out_size();

  // p((x,y) | k, w) = sum_{(u,v) in component k} p(u,v|k) p(x|u,w) p(y|v,w).
  std::vector<double> rows(static_cast<std::size_t>(nk) * nw * nx * ny, 0.0);
  for (int u = 0; u < nu; ++u) {
    for (int v = 0; v < nv; ++v) {
      double mass = h.p_uv.at(static_cast<std::size_t>(u) * nv + v);
      if (mass == 0.0) continue;
      int k = common.f_map[u];
      double cond = mass / common.k_dist.at(k);
      for (int w = 0; w < nw; ++w) {
        std::size_t row = (static_cast<std::size_t>(k) * nw + w) * nx * ny;
        for (int x = 0; x < nx; ++x) {
          double px = h.p_x_given_uw.at(u * nw + w, x);
          if (px == 0.0) continue;
          for (int y = 0; y < ny; ++y) {
            rows[row + static_cast<std::size_t>(x) * ny + y] +=
                cond * px * h.p_y_given_vw.at(v * nw + w, y);
          }
        }
      }
    }
  }
  // Components with zero mass never occur; give them valid uniform rows.
  for (int k = 0; k < nk; ++k) {
    if (common.k_dist.at(k) > 0.0) continue;
    for (int w = 0; w < nw; ++w) {
      std::size_t row = (static_cast<std::size_t>(k) * nw + w) * nx * ny;
      for (int c = 0; c < nx * ny; ++c) rows[row + c] = 1.0 / (nx * ny);
    }
  }
  SoftCoveringInstance inst(
      common.k_dist, h.p_w_given_k,
      ConditionalKernel(nk * nw, nx * ny, std::move(rows)));
  return HybridReduction{std::move(common), std::move(inst)};
}

ExperimentReport hybrid_experiment(const HybridInstance& h,
                                   const ProbabilityTable& target_xy,
                                   const std::vector<int>& n_list, int trials,
                                   std::uint64_t master_seed, int threads,
                                   std::size_t cap) {
  if (target_xy.num_coords() != 2) {
    throw std::invalid_argument("hybrid_experiment: target must be a pair joint");
  }
  HybridReduction red = hybrid_reduction(h);
  // Flatten the pair target to the (x,y) composite letter.
  ProbabilityTable flat_target({target_xy.shape()[0] * target_xy.shape()[1]},
                               target_xy.probs());
  ExperimentReport report = covering_experiment(red.instance, flat_target, n_list,
                                                trials, master_seed, threads, cap);
  report.experiment = "hybrid";
  return report;
}

}  // namespace dss
