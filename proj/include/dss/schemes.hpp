#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "dss/boolean_fourier.hpp"
#include "dss/probability.hpp"

namespace dss {

// n-bit to m-bit map stored as one Boolean function per output coordinate.
// Output index encoding matches the input one: bit j set <=> output j = -1.
struct BooleanMap {
  int n;
  std::vector<BooleanFunction> outputs;

  BooleanMap(int n_in, std::vector<BooleanFunction> outs);

  int out_bits() const { return static_cast<int>(outputs.size()); }
  std::uint32_t apply(std::uint32_t input) const;
  std::vector<std::uint32_t> index_map() const;

  static BooleanMap identity(int n);
  static BooleanMap from_index_map(int n, std::span<const std::uint32_t> map);
};

// X^n = f(U^n), Y^n = g(V^n) with all component functions sharing n.
struct DeterministicScheme {
  int n;
  BooleanMap f;
  BooleanMap g;

  DeterministicScheme(BooleanMap f_in, BooleanMap g_in);

  nlohmann::ordered_json to_json() const;
  static DeterministicScheme from_json(const nlohmann::json& j);
};

// X_i = f_i(U^n, A), Y_i = g_i(V^n, B) with local randomness A, B drawn
// independently of each other and of the source.
struct RandomizedScheme {
  int n;
  ProbabilityTable a_dist;
  ProbabilityTable b_dist;
  std::vector<BooleanMap> f_by_a;
  std::vector<BooleanMap> g_by_b;

  RandomizedScheme(ProbabilityTable a, ProbabilityTable b,
                   std::vector<BooleanMap> f, std::vector<BooleanMap> g);

  nlohmann::ordered_json to_json() const;
  static RandomizedScheme from_json(const nlohmann::json& j);
};

// x_j = signs[j] * u_{sigma[j]}; sigma is a bijection on coordinates.
struct SignedPermutation {
  std::vector<int> sigma;
  std::vector<std::int8_t> signs;

  BooleanMap to_map() const;
};

// Exact pushforward of DSBS(p)^n through (f, g), as a pair-interleaved
// table over (x1,y1,...,xn,yn).
ProbabilityTable induced_joint(const DeterministicScheme& s, double p, int cap_n = 10);
ProbabilityTable induced_joint(const RandomizedScheme& s, double p, int cap_n = 10);

// D(induced joint || DSBS(q)^n) in bits.
double simulation_divergence(const DeterministicScheme& s, double p, double q,
                             int cap_n = 10);
double simulation_divergence(const RandomizedScheme& s, double p, double q,
                             int cap_n = 10);

// E d_H(f(U^n), g(V^n)) by exact enumeration.
double expected_hamming_distance(const DeterministicScheme& s, double p);

// Divergence lower bound from the expected Hamming distance alone:
// log2((1-q)/q) E d_H + n (log2((1-p)/(1-q)) - p log2((1-p)/p)).
// Tight exactly when both maps are bijections.
double hamming_lower_bound(const DeterministicScheme& s, double p, double q);

// Recovers the signed coordinate permutation if every output coordinate is a
// signed dictator on a distinct source coordinate.
std::optional<SignedPermutation> is_signed_permutation(const BooleanMap& m);

// d_H(m(x), m(y)) == d_H(x, y) for all pairs; O(4^n) check.
bool preserves_hamming(const BooleanMap& m, int cap_n = 6);

// Pr over a uniform input that the image point has more than one preimage.
double mostly_bijection_probability(const BooleanMap& m);

// Per-coordinate spectral profile of a deterministic scheme, plus the sums
// compared against the divergence bounds: sum(W0) vs 4 ln2 * eps and
// sum(1 - W1) vs 2 eps / (p(1-2p)).
struct CoordinateLevelProfile {
  double w0_f, w1_f, dict_dist_f;
  double w0_g, w1_g, dict_dist_g;
};

struct LevelProfile {
  std::vector<CoordinateLevelProfile> coords;
  double w0_sum;
  double w1_deficit_sum;
};

LevelProfile level_profile(const DeterministicScheme& s);

// Best product-of-scalar-channels approximation of a kernel U^n -> X^n:
// the coordinate pairing maximizes sum_j |E[X_j U_{sigma[j]}]| (exhaustive
// for n <= cap_n), each scalar channel is the exact conditional of the
// paired coordinates, and expected_tv is the mean over u^n of the total
// variation between the kernel row and the product row.
struct ScalarApproximation {
  SignedPermutation sigma;
  std::vector<ConditionalKernel> scalar_kernels;
  double expected_tv;
  double tv_median;
  double tv_max;
};

ScalarApproximation best_scalar_approximation(const ConditionalKernel& kernel,
                                              int cap_n = 8);

// rho(X;Y | a,b) = (E(XY|ab) - E(X|a)E(Y|b)) / sqrt(Var(X|a) Var(Y|b)) per
// cell of a (X,Y,A,B) joint with X,Y binary (symbol 0 -> +1, 1 -> -1).
// Cells with zero conditional variance or zero mass are flagged degenerate
// and excluded from maxima.
struct ConditionalCorrelation {
  int a_size, b_size;
  std::vector<double> rho;
  std::vector<std::uint8_t> degenerate;

  double max_rho() const;
};

ConditionalCorrelation conditional_correlation(const ProbabilityTable& joint_xyab);

// Finite-instance check of the conditional-bias power bound: under A _|_ B,
// the Markov chains X-A-B and Y-B-A, biases and correlation deviation at
// most eps, and conditional correlation at most 1-2p, it must hold that
// lhs = E[E(X|A)^2 + E(Y|B)^2] <= rhs = 2 eps (1+eps) / (1-2p).
struct PowerBoundCheck {
  bool premises_hold;
  double lhs;
  double rhs;
  double independence_dev;
  double markov_dev_x;
  double markov_dev_y;
  double bias_x;
  double bias_y;
  double corr_dev;
  double max_conditional_corr;
};

PowerBoundCheck power_bound_check(const ProbabilityTable& joint_xyab, double p,
                                  double eps, double structural_tol = 1e-9);

// Per-coordinate Pinsker sums for a pair-interleaved binary joint against a
// DSBS(target_flip) target; both are below the simulation divergence.
struct ManouverCheck {
  double claim1_lhs;  // (1/2ln2) sum_i (E(X_i Y_i) - (1-2 target_flip))^2
  double claim2_lhs;  // (1/2ln2) sum_i E(X_i)^2
};

ManouverCheck manouver_check(const ProbabilityTable& joint_n, double target_flip);

// Single-letter (X_i, Y_i, A, B) joint induced by a randomized scheme.
ProbabilityTable randomized_letter_joint(const RandomizedScheme& s, double p, int coord);

// Exact conditional kernel u^n -> x^n of one side of a scheme.
ConditionalKernel side_kernel(const BooleanMap& m);
ConditionalKernel side_kernel(const ProbabilityTable& dist,
                              const std::vector<BooleanMap>& by_symbol);

}  // namespace dss
