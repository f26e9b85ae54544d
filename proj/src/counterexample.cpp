#include "dss/counterexample.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace dss {

namespace {

void validate_lengths(int n, int block_len) {
  if (block_len < 2) throw std::invalid_argument("block_len must be >= 2");
  if (n < block_len || n % block_len != 0) {
    throw std::invalid_argument("block_len must divide n");
  }
}

}  // namespace

BlockParityScheme build_scheme(int n, int block_len, double p, double target_delta) {
  validate_lengths(n, block_len);
  if (!(p >= 0.0 && p < 0.5)) throw std::domain_error("build_scheme: p must be in [0, 1/2)");
  if (!(target_delta >= 0.0 && p + target_delta <= 0.5)) {
    throw std::domain_error("build_scheme: need 0 <= p + target_delta <= 1/2");
  }
  double q = target_delta / (1.0 - 2.0 * p);
  double mu = 2.0 * target_delta / (1.0 - 2.0 * p);
  if (mu > 1.0) throw std::domain_error("build_scheme: mu exceeds 1");
  return BlockParityScheme{n, block_len, q, mu, BlockParityVariant::kDelta};
}

BlockParityScheme build_epsilon_variant(int n, int block_len, double p, double q_param,
                                        double mu_param) {
  validate_lengths(n, block_len);
  if (!(p >= 0.0 && p < 0.5)) {
    throw std::domain_error("build_epsilon_variant: p must be in [0, 1/2)");
  }
  if (!(q_param >= 0.0 && q_param <= 0.5) || !(mu_param >= 0.0 && mu_param <= 1.0)) {
    throw std::domain_error("build_epsilon_variant: q in [0,1/2], mu in [0,1]");
  }
  return BlockParityScheme{n, block_len, q_param, mu_param, BlockParityVariant::kEpsilon};
}

ConditionalKernel block_output_kernel(const BlockParityScheme& s) {
  const int L = s.block_len;
  const std::uint32_t space = std::uint32_t{1} << L;
  std::vector<double> rows(static_cast<std::size_t>(space) * space);
  for (std::uint32_t v = 0; v < space; ++v) {
    const std::uint32_t head = v & (space / 2 - 1);
    const int parity = std::popcount(head) & 1;
    const int v_last = (v >> (L - 1)) & 1;
    for (std::uint32_t y = 0; y < space; ++y) {
      double pr = 1.0;
      std::uint32_t head_diff = (y ^ v) & (space / 2 - 1);
      int flips = std::popcount(head_diff);
      pr *= std::pow(s.q, flips) * std::pow(1.0 - s.q, L - 1 - flips);
      const int y_last = (y >> (L - 1)) & 1;
      double pl = (1.0 - s.mu) * (y_last == v_last ? 1.0 : 0.0) +
                  s.mu * (y_last == parity ? 1.0 : 0.0);
      rows[static_cast<std::size_t>(v) * space + y] = pr * pl;
    }
  }
  return ConditionalKernel(static_cast<int>(space), static_cast<int>(space),
                           std::move(rows));
}

ConditionalKernel full_output_kernel(const BlockParityScheme& s, std::size_t cap) {
  const std::size_t full = std::size_t{1} << s.n;
  if (full * full > cap) {
    throw CapExceeded("full_output_kernel: kernel exceeds cell cap", full * full, cap);
  }
  ConditionalKernel block = block_output_kernel(s);
  const int blocks = s.n / s.block_len;
  const std::uint32_t bspace = std::uint32_t{1} << s.block_len;
  std::vector<double> rows(full * full);
  for (std::uint32_t v = 0; v < full; ++v) {
    for (std::uint32_t y = 0; y < full; ++y) {
      double pr = 1.0;
      for (int b = 0; b < blocks; ++b) {
        std::uint32_t vb = (v >> (b * s.block_len)) & (bspace - 1);
        std::uint32_t yb = (y >> (b * s.block_len)) & (bspace - 1);
        pr *= block.at(static_cast<int>(vb), static_cast<int>(yb));
        if (pr == 0.0) break;
      }
      rows[static_cast<std::size_t>(v) * full + y] = pr;
    }
  }
  return ConditionalKernel(static_cast<int>(full), static_cast<int>(full),
                           std::move(rows));
}

ProbabilityTable induced_joint(const BlockParityScheme& s, double p, std::size_t cap) {
  // X = U, so the block joint over (x_block, y_block) is the DSBS block
  // pushed through the block kernel; blocks are independent by construction.
  const int L = s.block_len;
  const std::uint32_t bspace = std::uint32_t{1} << L;
  ConditionalKernel block = block_output_kernel(s);
  std::vector<KahanSum> acc(std::size_t{1} << (2 * L));
  const double pu = 1.0 / static_cast<double>(bspace);
  for (std::uint32_t u = 0; u < bspace; ++u) {
    for (std::uint32_t z = 0; z < bspace; ++z) {
      int flips = std::popcount(z);
      double w = pu * std::pow(p, flips) * std::pow(1.0 - p, L - flips);
      if (w == 0.0) continue;
      std::uint32_t v = u ^ z;
      for (std::uint32_t y = 0; y < bspace; ++y) {
        double k = block.at(static_cast<int>(v), static_cast<int>(y));
        if (k == 0.0) continue;
        // Pair-interleaved index over (x1,y1,...,xL,yL).
        std::size_t idx = 0;
        for (int i = 0; i < L; ++i) {
          idx = (idx << 1) | ((u >> i) & 1u);
          idx = (idx << 1) | ((y >> i) & 1u);
        }
        acc[idx].add(w * k);
      }
    }
  }
  std::vector<double> probs(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) probs[i] = acc[i].value();
  ProbabilityTable block_joint(std::vector<int>(2 * L, 2), std::move(probs));
  return product_extend(block_joint, s.n / L, cap);
}

BlockParityMetrics exact_metrics(const BlockParityScheme& s, double p, std::size_t cap) {
  BlockParityMetrics out;
  out.target_flip = s.variant == BlockParityVariant::kDelta
                        ? p + s.q * (1.0 - 2.0 * p)
                        : p;
  ProbabilityTable joint = induced_joint(s, p, cap);
  out.flip_probs.resize(s.n);
  for (int i = 0; i < s.n; ++i) {
    const int pair_coords[] = {2 * i, 2 * i + 1};
    ProbabilityTable pair = joint.marginal(pair_coords);
    out.flip_probs[i] = pair.at(1) + pair.at(2);
  }
  out.decomposition = divergence_decomposition(joint, dsbs(out.target_flip));
  out.divergence_bits = kl_divergence(joint, product_extend(dsbs(out.target_flip), s.n));
  out.scalar_approx = best_scalar_approximation(full_output_kernel(s, cap), s.n);
  return out;
}

}  // namespace dss
