#include "dss/common_information.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dss/info_measures.hpp"

namespace dss {

namespace {

// Union-find over the two-sided symbol set {u_0..u_{nx-1}, v_0..v_{ny-1}}.
struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }

  void join(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

CommonPartDecomposition gk_common_information(const ProbabilityTable& joint,
                                              double zero_tol) {
  if (joint.num_coords() != 2) {
    throw std::invalid_argument("gk_common_information: expects a two-coordinate joint");
  }
  const int nx = joint.shape()[0], ny = joint.shape()[1];
  UnionFind uf(nx + ny);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      if (joint.at(static_cast<std::size_t>(x) * ny + y) > zero_tol) {
        uf.join(x, nx + y);
      }
    }
  }

  // Deterministic component ids: first occurrence scanning U then V symbols.
  std::vector<int> root_to_id(nx + ny, -1);
  std::vector<int> f_map(nx), g_map(ny);
  int next_id = 0;
  for (int x = 0; x < nx; ++x) {
    int r = uf.find(x);
    if (root_to_id[r] < 0) root_to_id[r] = next_id++;
    f_map[x] = root_to_id[r];
  }
  for (int y = 0; y < ny; ++y) {
    int r = uf.find(nx + y);
    if (root_to_id[r] < 0) root_to_id[r] = next_id++;
    g_map[y] = root_to_id[r];
  }

  std::vector<KahanSum> mass(next_id);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      double v = joint.at(static_cast<std::size_t>(x) * ny + y);
      if (v > 0.0) mass[f_map[x]].add(v);
    }
  }
  std::vector<double> k(next_id);
  for (int i = 0; i < next_id; ++i) k[i] = mass[i].value();
  ProbabilityTable k_dist({next_id}, std::move(k));
  double h = entropy(k_dist);
  return CommonPartDecomposition{std::move(f_map), std::move(g_map), std::move(k_dist), h};
}

CommonPartDecomposition gk_tensorized(const ProbabilityTable& joint, int n,
                                      double zero_tol, std::size_t cap) {
  ProbabilityTable big = product_extend(joint, n, cap);
  return gk_common_information(pair_grouped(big), zero_tol);
}

double wyner_dsbs(double q) {
  if (!(q >= 0.0 && q <= 0.5)) {
    throw std::domain_error("wyner_dsbs: q must be in [0, 1/2]");
  }
  double a = 0.5 - 0.5 * std::sqrt(1.0 - 2.0 * q);
  return 1.0 + binary_entropy(q) - 2.0 * binary_entropy(a);
}

double wyner_dsbs_inverse(double bits) {
  if (!(bits >= 0.0 && bits <= 1.0)) {
    throw std::domain_error("wyner_dsbs_inverse: bits must be in [0, 1]");
  }
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (wyner_dsbs(mid) > bits) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace dss
