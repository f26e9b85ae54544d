#pragma once

#include <vector>

#include "dss/probability.hpp"

namespace dss {

// Gacs-Korner common part of a pair joint: the connected-component label of
// the support's bipartite graph. f_map / g_map send the two sides' symbols
// to component ids; Pr(f(U) = g(V)) = 1 under the joint.
struct CommonPartDecomposition {
  std::vector<int> f_map;
  std::vector<int> g_map;
  ProbabilityTable k_dist;
  double entropy_bits;

  int component_count() const { return k_dist.shape()[0]; }
};

// Entries <= zero_tol count as structural zeros of the support graph. The
// common information is discontinuous in the support, so the threshold is
// explicit rather than baked in.
CommonPartDecomposition gk_common_information(const ProbabilityTable& joint,
                                              double zero_tol = 1e-15);

// gk_common_information on the n-fold product, with the two sides grouped
// into composite symbols. Entropy tensorizes: n * C_GK.
CommonPartDecomposition gk_tensorized(const ProbabilityTable& joint, int n,
                                      double zero_tol = 1e-15,
                                      std::size_t cap = kDefaultCellCap);

// Wyner common information of a DSBS(q), q in [0, 1/2]:
// 1 + h_b(q) - 2 h_b(1/2 - sqrt(1-2q)/2).
double wyner_dsbs(double q);

// Solves wyner_dsbs(q) = bits on [0, 1/2] (the function is decreasing).
double wyner_dsbs_inverse(double bits);

}  // namespace dss
