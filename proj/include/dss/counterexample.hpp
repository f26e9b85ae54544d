#pragma once

#include <vector>

#include "dss/info_measures.hpp"
#include "dss/probability.hpp"
#include "dss/schemes.hpp"

namespace dss {

// Block-parity construction: X^n = U^n clean; within each block of length
// block_len, every non-last Y coordinate is V through a BSC(q), and the last
// Y coordinate is V itself except that with probability mu it becomes the
// parity of the block's other V coordinates.
enum class BlockParityVariant { kDelta, kEpsilon };

struct BlockParityScheme {
  int n;
  int block_len;
  double q;
  double mu;
  BlockParityVariant variant;
};

// Delta variant: q and mu are set so every coordinate has
// Pr(X_i != Y_i) = p + target_delta, zeroing all marginal divergence terms:
// q = target_delta / (1-2p), mu = 2 target_delta / (1-2p).
BlockParityScheme build_scheme(int n, int block_len, double p, double target_delta);

// Epsilon variant: q and mu supplied independently; the per-coordinate
// flip probabilities no longer match and the marginal terms are nonzero.
BlockParityScheme build_epsilon_variant(int n, int block_len, double p, double q_param,
                                        double mu_param);

// Exact conditional kernel of one block, p(y_block | v_block), 2^L x 2^L.
ConditionalKernel block_output_kernel(const BlockParityScheme& s);

// Kernel v^n -> y^n: blocks are independent, so the full kernel is the
// per-block kernel tensored across blocks.
ConditionalKernel full_output_kernel(const BlockParityScheme& s,
                                     std::size_t cap = kDefaultCellCap);

// Exact pushforward of DSBS(p)^n, pair-interleaved over (x1,y1,...).
ProbabilityTable induced_joint(const BlockParityScheme& s, double p,
                               std::size_t cap = kDefaultCellCap);

struct BlockParityMetrics {
  std::vector<double> flip_probs;
  double divergence_bits;
  DivergenceDecomposition decomposition;
  ScalarApproximation scalar_approx;
  double target_flip;
};

// Per-coordinate flip probabilities, divergence to the scheme's target
// (DSBS(p + q(1-2p)) for the delta variant, DSBS(p) for the epsilon
// variant), its chain-rule decomposition, and the scalar-approximation
// distance of the Y^n kernel.
BlockParityMetrics exact_metrics(const BlockParityScheme& s, double p,
                                 std::size_t cap = kDefaultCellCap);

}  // namespace dss
