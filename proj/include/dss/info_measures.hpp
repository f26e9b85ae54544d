#pragma once

#include <vector>

#include "dss/probability.hpp"

namespace dss {

// All measures are in bits (log base 2); 0*log 0 = 0. A divergence with
// p(x) > 0 on a q(x) = 0 cell returns +infinity.

double entropy(const ProbabilityTable& p);
double entropy(std::span<const double> probs);

// h_b(x) = -x log2 x - (1-x) log2(1-x); domain [0, 1].
double binary_entropy(double x);

double kl_divergence(const ProbabilityTable& p, const ProbabilityTable& q);

// 0.5 * sum |p - q|, in [0, 1].
double total_variation(const ProbabilityTable& p, const ProbabilityTable& q);

// I(X;Y) = D(p_XY || p_X p_Y) for a two-coordinate joint.
double mutual_information(const ProbabilityTable& joint);

// Chain-rule split of D(p_{X^nY^n} || target^{(x) n}) for a pair-interleaved
// joint (x1,y1,...,xn,yn): per-position memory terms
// I(X_i,Y_i; X^{i-1},Y^{i-1}) plus per-position marginal mismatches
// D(p_{X_iY_i} || target). The two lists sum to the direct divergence.
struct DivergenceDecomposition {
  std::vector<double> mi_terms;
  std::vector<double> marginal_divs;
  double total = 0.0;
};

DivergenceDecomposition divergence_decomposition(const ProbabilityTable& joint_n,
                                                 const ProbabilityTable& target);

// Hirschfeld-Gebelein-Renyi maximal correlation of a two-coordinate joint:
// second-largest singular value of p(x,y)/sqrt(p(x)p(y)) after dropping
// zero-mass symbols. Degenerate (single-symbol) marginals give 0.
double maximal_correlation(const ProbabilityTable& joint);

}  // namespace dss
