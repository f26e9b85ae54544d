#include "dss/info_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace dss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_shape(const ProbabilityTable& p, const ProbabilityTable& q,
                        const char* what) {
  if (p.shape() != q.shape()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
  }
}

}  // namespace

double entropy(std::span<const double> probs) {
  KahanSum h;
  for (double v : probs) {
    if (v > 0.0) h.add(-v * std::log2(v));
  }
  return std::max(0.0, h.value());
}

double entropy(const ProbabilityTable& p) { return entropy(p.probs()); }

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("binary_entropy: argument outside [0,1]");
  }
  double h = 0.0;
  if (x > 0.0) h -= x * std::log2(x);
  if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
  return h;
}

double kl_divergence(const ProbabilityTable& p, const ProbabilityTable& q) {
  require_same_shape(p, q, "kl_divergence");
  KahanSum d;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double pv = p.at(i);
    if (pv == 0.0) continue;
    double qv = q.at(i);
    if (qv == 0.0) return kInf;
    d.add(pv * std::log2(pv / qv));
  }
  return d.value();
}

double total_variation(const ProbabilityTable& p, const ProbabilityTable& q) {
  require_same_shape(p, q, "total_variation");
  KahanSum s;
  for (std::size_t i = 0; i < p.size(); ++i) s.add(std::abs(p.at(i) - q.at(i)));
  return 0.5 * s.value();
}

double mutual_information(const ProbabilityTable& joint) {
  if (joint.num_coords() != 2) {
    throw std::invalid_argument("mutual_information: expects a two-coordinate joint");
  }
  const int coord0[] = {0};
  const int coord1[] = {1};
  ProbabilityTable px = joint.marginal(coord0);
  ProbabilityTable py = joint.marginal(coord1);
  const int ny = joint.shape()[1];
  KahanSum mi;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    double v = joint.at(i);
    if (v == 0.0) continue;
    double prod = px.at(i / ny) * py.at(i % ny);
    mi.add(v * std::log2(v / prod));
  }
  return std::max(0.0, mi.value());
}

DivergenceDecomposition divergence_decomposition(const ProbabilityTable& joint_n,
                                                 const ProbabilityTable& target) {
  if (target.num_coords() != 2) {
    throw std::invalid_argument("divergence_decomposition: target must have 2 coordinates");
  }
  const int coords = joint_n.num_coords();
  if (coords % 2 != 0) {
    throw std::invalid_argument("divergence_decomposition: joint must have 2n coordinates");
  }
  const int n = coords / 2;
  for (int i = 0; i < n; ++i) {
    if (joint_n.shape()[2 * i] != target.shape()[0] ||
        joint_n.shape()[2 * i + 1] != target.shape()[1]) {
      throw std::invalid_argument("divergence_decomposition: alphabet mismatch with target");
    }
  }

  DivergenceDecomposition out;
  out.mi_terms.resize(n);
  out.marginal_divs.resize(n);

  // I(pair_i ; pairs_<i) = H(pair_i) + H(prefix_{i-1}) - H(prefix_i).
  double prev_prefix_entropy = 0.0;
  std::vector<int> prefix;
  for (int i = 0; i < n; ++i) {
    prefix.push_back(2 * i);
    prefix.push_back(2 * i + 1);
    const int pair_coords[] = {2 * i, 2 * i + 1};
    ProbabilityTable pair = joint_n.marginal(pair_coords);
    double h_prefix = (i + 1 == n) ? entropy(joint_n) : entropy(joint_n.marginal(prefix));
    double mi = entropy(pair) + prev_prefix_entropy - h_prefix;
    out.mi_terms[i] = std::max(0.0, mi);
    out.marginal_divs[i] = kl_divergence(pair, target);
    prev_prefix_entropy = h_prefix;
  }

  KahanSum total;
  bool inf = false;
  for (int i = 0; i < n; ++i) {
    if (std::isinf(out.marginal_divs[i])) inf = true;
    total.add(out.mi_terms[i]);
    total.add(out.marginal_divs[i]);
  }
  out.total = inf ? kInf : total.value();
  return out;
}

double maximal_correlation(const ProbabilityTable& joint) {
  if (joint.num_coords() != 2) {
    throw std::invalid_argument("maximal_correlation: expects a two-coordinate joint");
  }
  const int nx = joint.shape()[0], ny = joint.shape()[1];
  const int coord0[] = {0};
  const int coord1[] = {1};
  ProbabilityTable px = joint.marginal(coord0);
  ProbabilityTable py = joint.marginal(coord1);

  std::vector<int> xs, ys;
  for (int x = 0; x < nx; ++x)
    if (px.at(x) > 0.0) xs.push_back(x);
  for (int y = 0; y < ny; ++y)
    if (py.at(y) > 0.0) ys.push_back(y);
  if (xs.size() < 2 || ys.size() < 2) return 0.0;

  Eigen::MatrixXd m(xs.size(), ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      double v = joint.at(static_cast<std::size_t>(xs[i]) * ny + ys[j]);
      m(i, j) = v / std::sqrt(px.at(xs[i]) * py.at(ys[j]));
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  double rho = svd.singularValues()(1);
  return std::clamp(rho, 0.0, 1.0);
}

}  // namespace dss
