#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "dss/common_information.hpp"
#include "dss/experiment_report.hpp"
#include "dss/probability.hpp"

namespace dss {

// Default cap on |U|^n (codebook rows) and |X|^n (output cells) in the
// exact per-codebook divergence enumeration.
inline constexpr std::size_t kCoveringSpaceCap = std::size_t{1} << 20;

// The single-letter triple (U, W, X): p_U, p_{W|U} and p_{X|UW}, where the
// channel input is the pair (u, w) indexed u * |W| + w.
struct SoftCoveringInstance {
  ProbabilityTable p_u;
  ConditionalKernel p_w_given_u;
  ConditionalKernel p_x_given_uw;

  SoftCoveringInstance(ProbabilityTable u, ConditionalKernel w_given_u,
                       ConditionalKernel x_given_uw);

  int u_size() const { return p_u.shape()[0]; }
  int w_size() const { return p_w_given_u.out_size(); }
  int x_size() const { return p_x_given_uw.out_size(); }

  // Joint over (U, W, X).
  ProbabilityTable letter_joint() const;
  // Output marginal p_X.
  ProbabilityTable x_marginal() const;

  nlohmann::ordered_json to_json() const;
  static SoftCoveringInstance from_json(const nlohmann::json& j);
};

// H(U) - I(X; U, W): soft covering drives the divergence to zero when this
// is positive.
double rate_gap(const SoftCoveringInstance& inst);

// One random encoding u^n -> w^n; rows are drawn i.i.d. per the product
// kernel. Total on all |U|^n inputs; w^n stored base-|W| last-symbol-fastest.
struct Codebook {
  int n;
  std::vector<std::uint32_t> rows;
};

// Bit-reproducible given the seed; each row uses its own counter-derived
// stream, so the result does not depend on evaluation order.
Codebook sample_codebook(const SoftCoveringInstance& inst, int n, std::uint64_t seed,
                         std::size_t cap = kCoveringSpaceCap);

// Exact D(p_{X^n | A=cb} || target^n) by enumeration; the default target is
// the instance's own output marginal p_X.
double covering_divergence(const SoftCoveringInstance& inst, const Codebook& cb,
                           std::size_t cap = kCoveringSpaceCap);
double covering_divergence(const SoftCoveringInstance& inst, const Codebook& cb,
                           const ProbabilityTable& target_letter,
                           std::size_t cap = kCoveringSpaceCap);

// log2 E[Z^gamma] with Z = p(U) p(X|U,W) / p(X); gamma in (0, 1).
double gamma_exponent(const SoftCoveringInstance& inst, double gamma);

// 64 log-spaced gamma values in (1e-3, 1-1e-3) and the minimum exponent
// over that grid; negative somewhere iff the covering exponent is active.
std::vector<double> gamma_exponent_grid();
double min_gamma_exponent(const SoftCoveringInstance& inst);

// Per-n statistics of covering_divergence over `trials` independent seeded
// codebooks. Deterministic given master_seed and independent of `threads`.
ExperimentReport covering_experiment(const SoftCoveringInstance& inst,
                                     const std::vector<int>& n_list, int trials,
                                     std::uint64_t master_seed, int threads = 1,
                                     std::size_t cap = kCoveringSpaceCap);
ExperimentReport covering_experiment(const SoftCoveringInstance& inst,
                                     const ProbabilityTable& target_letter,
                                     const std::vector<int>& n_list, int trials,
                                     std::uint64_t master_seed, int threads = 1,
                                     std::size_t cap = kCoveringSpaceCap);

// Hybrid construction: W is generated from the common part K of (U, V)
// only, X from (U, W), Y from (V, W).
struct HybridInstance {
  ProbabilityTable p_uv;
  ConditionalKernel p_w_given_k;
  ConditionalKernel p_x_given_uw;
  ConditionalKernel p_y_given_vw;

  HybridInstance(ProbabilityTable uv, ConditionalKernel w_given_k,
                 ConditionalKernel x_given_uw, ConditionalKernel y_given_vw);

  nlohmann::ordered_json to_json() const;
  static HybridInstance from_json(const nlohmann::json& j);
};

// Tilde-variable reduction: the hybrid scheme is soft covering on
// (K, W, (X,Y)) with the pair output flattened to x * |Y| + y. Requires a
// nonzero common part.
struct HybridReduction {
  CommonPartDecomposition common;
  SoftCoveringInstance instance;
};

HybridReduction hybrid_reduction(const HybridInstance& h);

// Exact D(p_{X^nY^n | A} || target^n) statistics over seeded codebooks on
// K^n -> W^n. target_xy is a two-coordinate table over (X, Y).
ExperimentReport hybrid_experiment(const HybridInstance& h,
                                   const ProbabilityTable& target_xy,
                                   const std::vector<int>& n_list, int trials,
                                   std::uint64_t master_seed, int threads = 1,
                                   std::size_t cap = kCoveringSpaceCap);

}  // namespace dss
