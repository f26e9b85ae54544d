#include "dss/schemes.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dss/info_measures.hpp"

namespace dss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_cap_n(int n, int cap_n, const char* what) {
  if (n > cap_n) {
    throw CapExceeded(std::string(what) + ": n exceeds enumeration cap",
                      static_cast<std::size_t>(n), static_cast<std::size_t>(cap_n));
  }
}

// Pair-interleaved flat index for (x^n, y^n): coordinate order
// (x1,y1,...,xn,yn) with the last coordinate fastest.
std::size_t interleave_xy(std::uint32_t x, std::uint32_t y, int n) {
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    idx = (idx << 1) | ((x >> i) & 1u);
    idx = (idx << 1) | ((y >> i) & 1u);
  }
  return idx;
}

std::vector<double> flip_weights(double p, int n) {
  std::vector<double> w(n + 1);
  for (int k = 0; k <= n; ++k) w[k] = std::pow(p, k) * std::pow(1.0 - p, n - k);
  return w;
}

std::vector<int> all_twos(int count) { return std::vector<int>(count, 2); }

ProbabilityTable accumulate_pair_table(std::vector<KahanSum>& acc, int n) {
  std::vector<double> probs(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) probs[i] = acc[i].value();
  return ProbabilityTable(all_twos(2 * n), std::move(probs));
}

void add_deterministic_mass(std::vector<KahanSum>& acc, const BooleanMap& f,
                            const BooleanMap& g, double p, double weight, int n) {
  const std::uint32_t space = std::uint32_t{1} << n;
  const std::vector<std::uint32_t> fm = f.index_map();
  const std::vector<std::uint32_t> gm = g.index_map();
  const std::vector<double> fw = flip_weights(p, n);
  const double pu = 1.0 / static_cast<double>(space);
  for (std::uint32_t u = 0; u < space; ++u) {
    for (std::uint32_t z = 0; z < space; ++z) {
      double w = weight * pu * fw[std::popcount(z)];
      if (w == 0.0) continue;
      acc[interleave_xy(fm[u], gm[u ^ z], n)].add(w);
    }
  }
}

}  // namespace

BooleanMap::BooleanMap(int n_in, std::vector<BooleanFunction> outs)
    : n(n_in), outputs(std::move(outs)) {
  if (outputs.empty()) throw std::invalid_argument("BooleanMap: no outputs");
  for (const BooleanFunction& f : outputs) {
    if (f.n != n) throw std::invalid_argument("BooleanMap: component n mismatch");
  }
}

std::uint32_t BooleanMap::apply(std::uint32_t input) const {
  std::uint32_t out = 0;
  for (int j = 0; j < out_bits(); ++j) {
    if (outputs[j].values[input] == -1) out |= std::uint32_t{1} << j;
  }
  return out;
}

std::vector<std::uint32_t> BooleanMap::index_map() const {
  std::vector<std::uint32_t> map(std::size_t{1} << n);
  for (std::uint32_t u = 0; u < map.size(); ++u) map[u] = apply(u);
  return map;
}

BooleanMap BooleanMap::identity(int n) {
  std::vector<BooleanFunction> outs;
  outs.reserve(n);
  for (int j = 0; j < n; ++j) outs.push_back(BooleanFunction::dictator(n, j));
  return BooleanMap(n, std::move(outs));
}

BooleanMap BooleanMap::from_index_map(int n, std::span<const std::uint32_t> map) {
  if (map.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("from_index_map: wrong table length");
  }
  std::vector<BooleanFunction> outs;
  outs.reserve(n);
  for (int j = 0; j < n; ++j) {
    std::vector<std::int8_t> vals(map.size());
    for (std::size_t u = 0; u < map.size(); ++u) {
      vals[u] = (map[u] >> j) & 1u ? -1 : 1;
    }
    outs.emplace_back(n, std::move(vals));
  }
  return BooleanMap(n, std::move(outs));
}

DeterministicScheme::DeterministicScheme(BooleanMap f_in, BooleanMap g_in)
    : n(f_in.n), f(std::move(f_in)), g(std::move(g_in)) {
  if (f.n != g.n || f.out_bits() != n || g.out_bits() != n) {
    throw std::invalid_argument("DeterministicScheme: maps must be n-bit to n-bit");
  }
}

nlohmann::ordered_json DeterministicScheme::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  for (const BooleanFunction& fi : f.outputs) j["f"].push_back(fi.to_hex());
  for (const BooleanFunction& gi : g.outputs) j["g"].push_back(gi.to_hex());
  return j;
}

DeterministicScheme DeterministicScheme::from_json(const nlohmann::json& j) {
  int n = j.at("n").get<int>();
  auto load = [n](const nlohmann::json& arr) {
    std::vector<BooleanFunction> outs;
    for (const auto& h : arr) outs.push_back(BooleanFunction::from_hex(n, h.get<std::string>()));
    return BooleanMap(n, std::move(outs));
  };
  return DeterministicScheme(load(j.at("f")), load(j.at("g")));
}

RandomizedScheme::RandomizedScheme(ProbabilityTable a, ProbabilityTable b,
                                   std::vector<BooleanMap> f, std::vector<BooleanMap> g)
    : n(f.empty() ? 0 : f.front().n),
      a_dist(std::move(a)),
      b_dist(std::move(b)),
      f_by_a(std::move(f)),
      g_by_b(std::move(g)) {
  if (a_dist.num_coords() != 1 || b_dist.num_coords() != 1) {
    throw std::invalid_argument("RandomizedScheme: randomness dists must be one-coordinate");
  }
  if (f_by_a.size() != static_cast<std::size_t>(a_dist.shape()[0]) ||
      g_by_b.size() != static_cast<std::size_t>(b_dist.shape()[0])) {
    throw std::invalid_argument("RandomizedScheme: map family sizes must match alphabets");
  }
  for (const BooleanMap& m : f_by_a) {
    if (m.n != n || m.out_bits() != n) {
      throw std::invalid_argument("RandomizedScheme: map shape mismatch");
    }
  }
  for (const BooleanMap& m : g_by_b) {
    if (m.n != n || m.out_bits() != n) {
      throw std::invalid_argument("RandomizedScheme: map shape mismatch");
    }
  }
}

nlohmann::ordered_json RandomizedScheme::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["a_dist"] = a_dist.to_json();
  j["b_dist"] = b_dist.to_json();
  auto dump_family = [](const std::vector<BooleanMap>& fam) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const BooleanMap& m : fam) {
      nlohmann::ordered_json tables = nlohmann::ordered_json::array();
      for (const BooleanFunction& f : m.outputs) tables.push_back(f.to_hex());
      arr.push_back(tables);
    }
    return arr;
  };
  j["f_by_a"] = dump_family(f_by_a);
  j["g_by_b"] = dump_family(g_by_b);
  return j;
}

RandomizedScheme RandomizedScheme::from_json(const nlohmann::json& j) {
  int n = j.at("n").get<int>();
  auto load_family = [n](const nlohmann::json& arr) {
    std::vector<BooleanMap> fam;
    for (const auto& tables : arr) {
      std::vector<BooleanFunction> outs;
      for (const auto& h : tables) outs.push_back(BooleanFunction::from_hex(n, h.get<std::string>()));
      fam.emplace_back(n, std::move(outs));
    }
    return fam;
  };
  return RandomizedScheme(ProbabilityTable::from_json(j.at("a_dist")),
                          ProbabilityTable::from_json(j.at("b_dist")),
                          load_family(j.at("f_by_a")), load_family(j.at("g_by_b")));
}

BooleanMap SignedPermutation::to_map() const {
  const int n = static_cast<int>(sigma.size());
  std::vector<BooleanFunction> outs;
  outs.reserve(n);
  for (int j = 0; j < n; ++j) {
    outs.push_back(BooleanFunction::dictator(n, sigma[j], signs[j]));
  }
  return BooleanMap(n, std::move(outs));
}

ProbabilityTable induced_joint(const DeterministicScheme& s, double p, int cap_n) {
  require_cap_n(s.n, cap_n, "induced_joint");
  std::vector<KahanSum> acc(std::size_t{1} << (2 * s.n));
  add_deterministic_mass(acc, s.f, s.g, p, 1.0, s.n);
  return accumulate_pair_table(acc, s.n);
}

ProbabilityTable induced_joint(const RandomizedScheme& s, double p, int cap_n) {
  require_cap_n(s.n, cap_n, "induced_joint");
  std::vector<KahanSum> acc(std::size_t{1} << (2 * s.n));
  for (std::size_t a = 0; a < s.f_by_a.size(); ++a) {
    for (std::size_t b = 0; b < s.g_by_b.size(); ++b) {
      double w = s.a_dist.at(a) * s.b_dist.at(b);
      if (w == 0.0) continue;
      add_deterministic_mass(acc, s.f_by_a[a], s.g_by_b[b], p, w, s.n);
    }
  }
  return accumulate_pair_table(acc, s.n);
}

double simulation_divergence(const DeterministicScheme& s, double p, double q, int cap_n) {
  return kl_divergence(induced_joint(s, p, cap_n), product_extend(dsbs(q), s.n));
}

double simulation_divergence(const RandomizedScheme& s, double p, double q, int cap_n) {
  return kl_divergence(induced_joint(s, p, cap_n), product_extend(dsbs(q), s.n));
}

double expected_hamming_distance(const DeterministicScheme& s, double p) {
  const std::uint32_t space = std::uint32_t{1} << s.n;
  const std::vector<std::uint32_t> fm = s.f.index_map();
  const std::vector<std::uint32_t> gm = s.g.index_map();
  const std::vector<double> fw = flip_weights(p, s.n);
  const double pu = 1.0 / static_cast<double>(space);
  KahanSum e;
  for (std::uint32_t z = 0; z < space; ++z) {
    double w = fw[std::popcount(z)];
    if (w == 0.0) continue;
    std::uint64_t dist = 0;
    for (std::uint32_t u = 0; u < space; ++u) {
      dist += static_cast<std::uint64_t>(std::popcount(fm[u] ^ gm[u ^ z]));
    }
    e.add(pu * w * static_cast<double>(dist));
  }
  return e.value();
}

double hamming_lower_bound(const DeterministicScheme& s, double p, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("hamming_lower_bound: q must be strictly inside (0,1)");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("hamming_lower_bound: p must be in [0,1]");
  }
  double ed = expected_hamming_distance(s, p);
  double marginal_term = std::log2((1.0 - p) / (1.0 - q));
  double source_term = p == 0.0 ? 0.0 : p * std::log2((1.0 - p) / p);
  return std::log2((1.0 - q) / q) * ed + s.n * (marginal_term - source_term);
}

std::optional<SignedPermutation> is_signed_permutation(const BooleanMap& m) {
  const std::uint32_t space = std::uint32_t{1} << m.n;
  SignedPermutation sp;
  sp.sigma.resize(m.out_bits());
  sp.signs.resize(m.out_bits());
  std::vector<bool> used(m.n, false);
  for (int j = 0; j < m.out_bits(); ++j) {
    // Exact dictator test: integer correlation with each coordinate.
    int found = -1;
    int sign = 0;
    for (int i = 0; i < m.n && found < 0; ++i) {
      std::int64_t dot = 0;
      for (std::uint32_t u = 0; u < space; ++u) {
        dot += static_cast<std::int64_t>(m.outputs[j].values[u]) *
               BooleanFunction::coord_value(u, i);
      }
      if (dot == static_cast<std::int64_t>(space)) {
        found = i;
        sign = 1;
      } else if (dot == -static_cast<std::int64_t>(space)) {
        found = i;
        sign = -1;
      }
    }
    if (found < 0 || used[found]) return std::nullopt;
    used[found] = true;
    sp.sigma[j] = found;
    sp.signs[j] = static_cast<std::int8_t>(sign);
  }
  return sp;
}

bool preserves_hamming(const BooleanMap& m, int cap_n) {
  require_cap_n(m.n, cap_n, "preserves_hamming");
  const std::uint32_t space = std::uint32_t{1} << m.n;
  const std::vector<std::uint32_t> map = m.index_map();
  for (std::uint32_t x = 0; x < space; ++x) {
    for (std::uint32_t y = x + 1; y < space; ++y) {
      if (std::popcount(map[x] ^ map[y]) != std::popcount(x ^ y)) return false;
    }
  }
  return true;
}

double mostly_bijection_probability(const BooleanMap& m) {
  const std::uint32_t space = std::uint32_t{1} << m.n;
  std::vector<std::uint32_t> count(std::size_t{1} << m.out_bits(), 0);
  const std::vector<std::uint32_t> map = m.index_map();
  for (std::uint32_t u = 0; u < space; ++u) count[map[u]]++;
  std::uint64_t collided = 0;
  for (std::uint32_t u = 0; u < space; ++u) {
    if (count[map[u]] > 1) collided++;
  }
  return static_cast<double>(collided) / static_cast<double>(space);
}

LevelProfile level_profile(const DeterministicScheme& s) {
  LevelProfile out;
  out.coords.resize(s.n);
  KahanSum w0_sum, deficit;
  for (int i = 0; i < s.n; ++i) {
    FourierSpectrum fs = wht(s.f.outputs[i]);
    FourierSpectrum gs = wht(s.g.outputs[i]);
    CoordinateLevelProfile& c = out.coords[i];
    c.w0_f = fourier_weight(fs, 0);
    c.w1_f = fourier_weight(fs, 1);
    c.dict_dist_f = dictator_distance(s.f.outputs[i]).dist;
    c.w0_g = fourier_weight(gs, 0);
    c.w1_g = fourier_weight(gs, 1);
    c.dict_dist_g = dictator_distance(s.g.outputs[i]).dist;
    w0_sum.add(c.w0_f + c.w0_g);
    deficit.add((1.0 - c.w1_f) + (1.0 - c.w1_g));
  }
  out.w0_sum = w0_sum.value();
  out.w1_deficit_sum = deficit.value();
  return out;
}

ScalarApproximation best_scalar_approximation(const ConditionalKernel& kernel, int cap_n) {
  int n = 0;
  while ((1 << n) < kernel.in_size()) ++n;
  if ((1 << n) != kernel.in_size() || kernel.in_size() != kernel.out_size()) {
    throw std::invalid_argument("best_scalar_approximation: kernel must be 2^n -> 2^n");
  }
  require_cap_n(n, cap_n, "best_scalar_approximation");
  const std::uint32_t space = std::uint32_t{1} << n;
  const double pu = 1.0 / static_cast<double>(space);

  // corr[j][i] = E[X_j U_i] under uniform U^n and the kernel.
  std::vector<std::vector<double>> corr(n, std::vector<double>(n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      KahanSum e;
      for (std::uint32_t u = 0; u < space; ++u) {
        int uv = BooleanFunction::coord_value(u, i);
        for (std::uint32_t x = 0; x < space; ++x) {
          double k = kernel.at(static_cast<int>(u), static_cast<int>(x));
          if (k == 0.0) continue;
          e.add(pu * k * uv * BooleanFunction::coord_value(x, j));
        }
      }
      corr[j][i] = e.value();
    }
  }

  // Assignment out_j -> in_sigma[j] maximizing the absolute-correlation sum;
  // lexicographically-first permutation wins ties.
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm = perm;
  double best_score = -1.0;
  do {
    double score = 0.0;
    for (int j = 0; j < n; ++j) score += std::abs(corr[j][perm[j]]);
    if (score > best_score + 1e-12) {
      best_score = score;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  ScalarApproximation out;
  out.sigma.sigma = best_perm;
  out.sigma.signs.resize(n);
  for (int j = 0; j < n; ++j) {
    out.sigma.signs[j] = corr[j][best_perm[j]] >= 0.0 ? 1 : -1;
  }

  // Exact conditional of X_j given its paired U coordinate.
  out.scalar_kernels.reserve(n);
  std::vector<std::array<double, 4>> joints(n, {0.0, 0.0, 0.0, 0.0});
  for (std::uint32_t u = 0; u < space; ++u) {
    for (std::uint32_t x = 0; x < space; ++x) {
      double w = pu * kernel.at(static_cast<int>(u), static_cast<int>(x));
      if (w == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        int ub = (u >> best_perm[j]) & 1u;
        int xb = (x >> j) & 1u;
        joints[j][ub * 2 + xb] += w;
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    double r0 = joints[j][0] + joints[j][1];
    double r1 = joints[j][2] + joints[j][3];
    out.scalar_kernels.emplace_back(
        2, 2,
        std::vector<double>{joints[j][0] / r0, joints[j][1] / r0, joints[j][2] / r1,
                            joints[j][3] / r1});
  }

  // TV between each kernel row and the paired product row.
  std::vector<double> tvs(space);
  for (std::uint32_t u = 0; u < space; ++u) {
    KahanSum abs_diff;
    for (std::uint32_t x = 0; x < space; ++x) {
      double prod = 1.0;
      for (int j = 0; j < n; ++j) {
        prod *= out.scalar_kernels[j].at((u >> best_perm[j]) & 1u, (x >> j) & 1u);
      }
      abs_diff.add(std::abs(kernel.at(static_cast<int>(u), static_cast<int>(x)) - prod));
    }
    tvs[u] = 0.5 * abs_diff.value();
  }
  KahanSum mean;
  for (double t : tvs) mean.add(t);
  out.expected_tv = mean.value() / static_cast<double>(space);
  std::vector<double> sorted = tvs;
  std::sort(sorted.begin(), sorted.end());
  out.tv_median = space % 2 == 0
                      ? 0.5 * (sorted[space / 2 - 1] + sorted[space / 2])
                      : sorted[space / 2];
  out.tv_max = sorted.back();
  return out;
}

double ConditionalCorrelation::max_rho() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!degenerate[i]) best = std::max(best, rho[i]);
  }
  return best;
}

ConditionalCorrelation conditional_correlation(const ProbabilityTable& joint_xyab) {
  if (joint_xyab.num_coords() != 4 || joint_xyab.shape()[0] != 2 ||
      joint_xyab.shape()[1] != 2) {
    throw std::invalid_argument(
        "conditional_correlation: expects (X,Y,A,B) with binary X,Y");
  }
  const int na = joint_xyab.shape()[2], nb = joint_xyab.shape()[3];
  ConditionalCorrelation out;
  out.a_size = na;
  out.b_size = nb;
  out.rho.assign(static_cast<std::size_t>(na) * nb, 0.0);
  out.degenerate.assign(static_cast<std::size_t>(na) * nb, 0);

  // Marginals needed for E(X|a) and E(Y|b); the paper's Markov setting
  // centers each side on its own randomness only.
  auto value = [](int sym) { return sym == 0 ? 1.0 : -1.0; };
  std::vector<double> pa(na, 0.0), pb(nb, 0.0), exa(na, 0.0), eyb(nb, 0.0);
  std::vector<double> pab(static_cast<std::size_t>(na) * nb, 0.0);
  std::vector<double> exy_ab(static_cast<std::size_t>(na) * nb, 0.0);
  std::vector<int> sym(4);
  for (std::size_t flat = 0; flat < joint_xyab.size(); ++flat) {
    double v = joint_xyab.at(flat);
    if (v == 0.0) continue;
    joint_xyab.decode(flat, sym);
    pa[sym[2]] += v;
    pb[sym[3]] += v;
    exa[sym[2]] += v * value(sym[0]);
    eyb[sym[3]] += v * value(sym[1]);
    std::size_t ab = static_cast<std::size_t>(sym[2]) * nb + sym[3];
    pab[ab] += v;
    exy_ab[ab] += v * value(sym[0]) * value(sym[1]);
  }
  for (int a = 0; a < na; ++a) exa[a] = pa[a] > 0.0 ? exa[a] / pa[a] : 0.0;
  for (int b = 0; b < nb; ++b) eyb[b] = pb[b] > 0.0 ? eyb[b] / pb[b] : 0.0;

  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < nb; ++b) {
      std::size_t ab = static_cast<std::size_t>(a) * nb + b;
      double var_x = 1.0 - exa[a] * exa[a];
      double var_y = 1.0 - eyb[b] * eyb[b];
      if (pab[ab] <= 0.0 || var_x <= 1e-12 || var_y <= 1e-12) {
        out.degenerate[ab] = 1;
        continue;
      }
      double exy = exy_ab[ab] / pab[ab];
      out.rho[ab] = (exy - exa[a] * eyb[b]) / std::sqrt(var_x * var_y);
    }
  }
  return out;
}

PowerBoundCheck power_bound_check(const ProbabilityTable& joint_xyab, double p,
                                  double eps, double structural_tol) {
  if (joint_xyab.num_coords() != 4 || joint_xyab.shape()[0] != 2 ||
      joint_xyab.shape()[1] != 2) {
    throw std::invalid_argument("power_bound_check: expects (X,Y,A,B) with binary X,Y");
  }
  if (!(p >= 0.0 && p < 0.5)) {
    throw std::domain_error("power_bound_check: p must be in [0, 1/2)");
  }
  const int na = joint_xyab.shape()[2], nb = joint_xyab.shape()[3];
  auto value = [](int sym) { return sym == 0 ? 1.0 : -1.0; };

  std::vector<double> pa(na, 0.0), pb(nb, 0.0);
  std::vector<double> pab(static_cast<std::size_t>(na) * nb, 0.0);
  std::vector<double> px_ab(static_cast<std::size_t>(na) * nb, 0.0);  // Pr(X=+1, a, b)
  std::vector<double> py_ab(static_cast<std::size_t>(na) * nb, 0.0);
  std::vector<double> exa(na, 0.0), eyb(nb, 0.0);
  double ex = 0.0, ey = 0.0, exy = 0.0;
  std::vector<int> sym(4);
  for (std::size_t flat = 0; flat < joint_xyab.size(); ++flat) {
    double v = joint_xyab.at(flat);
    if (v == 0.0) continue;
    joint_xyab.decode(flat, sym);
    std::size_t ab = static_cast<std::size_t>(sym[2]) * nb + sym[3];
    pa[sym[2]] += v;
    pb[sym[3]] += v;
    pab[ab] += v;
    if (sym[0] == 0) px_ab[ab] += v;
    if (sym[1] == 0) py_ab[ab] += v;
    exa[sym[2]] += v * value(sym[0]);
    eyb[sym[3]] += v * value(sym[1]);
    ex += v * value(sym[0]);
    ey += v * value(sym[1]);
    exy += v * value(sym[0]) * value(sym[1]);
  }

  PowerBoundCheck out{};
  // A independent of B.
  double indep = 0.0;
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < nb; ++b) {
      indep = std::max(indep,
                       std::abs(pab[static_cast<std::size_t>(a) * nb + b] - pa[a] * pb[b]));
    }
  }
  out.independence_dev = indep;

  // Markov X-A-B: Pr(X=+1 | a, b) must not depend on b. Same for Y-B-A.
  double mx = 0.0, my = 0.0;
  for (int a = 0; a < na; ++a) {
    double px_a = pa[a] > 0.0 ? (exa[a] / pa[a] + 1.0) / 2.0 : 0.5;
    for (int b = 0; b < nb; ++b) {
      std::size_t ab = static_cast<std::size_t>(a) * nb + b;
      if (pab[ab] <= 0.0) continue;
      mx = std::max(mx, std::abs(px_ab[ab] / pab[ab] - px_a));
    }
  }
  for (int b = 0; b < nb; ++b) {
    double py_b = pb[b] > 0.0 ? (eyb[b] / pb[b] + 1.0) / 2.0 : 0.5;
    for (int a = 0; a < na; ++a) {
      std::size_t ab = static_cast<std::size_t>(a) * nb + b;
      if (pab[ab] <= 0.0) continue;
      my = std::max(my, std::abs(py_ab[ab] / pab[ab] - py_b));
    }
  }
  out.markov_dev_x = mx;
  out.markov_dev_y = my;

  out.bias_x = std::abs(ex);
  out.bias_y = std::abs(ey);
  out.corr_dev = std::abs(exy - (1.0 - 2.0 * p));
  out.max_conditional_corr = conditional_correlation(joint_xyab).max_rho();

  out.premises_hold = indep <= structural_tol && mx <= structural_tol &&
                      my <= structural_tol && out.bias_x <= eps && out.bias_y <= eps &&
                      out.corr_dev <= eps &&
                      out.max_conditional_corr <= 1.0 - 2.0 * p + structural_tol;

  KahanSum lhs;
  for (int a = 0; a < na; ++a) {
    if (pa[a] > 0.0) lhs.add(pa[a] * (exa[a] / pa[a]) * (exa[a] / pa[a]));
  }
  for (int b = 0; b < nb; ++b) {
    if (pb[b] > 0.0) lhs.add(pb[b] * (eyb[b] / pb[b]) * (eyb[b] / pb[b]));
  }
  out.lhs = lhs.value();
  out.rhs = 2.0 * eps * (1.0 + eps) / (1.0 - 2.0 * p);
  return out;
}

ManouverCheck manouver_check(const ProbabilityTable& joint_n, double target_flip) {
  const int coords = joint_n.num_coords();
  if (coords % 2 != 0) {
    throw std::invalid_argument("manouver_check: joint must have 2n coordinates");
  }
  const int n = coords / 2;
  for (int c = 0; c < coords; ++c) {
    if (joint_n.shape()[c] != 2) {
      throw std::invalid_argument("manouver_check: coordinates must be binary");
    }
  }
  const double target_corr = 1.0 - 2.0 * target_flip;
  KahanSum claim1, claim2;
  std::vector<int> sym(coords);
  for (int i = 0; i < n; ++i) {
    const int pair_coords[] = {2 * i, 2 * i + 1};
    ProbabilityTable pair = joint_n.marginal(pair_coords);
    double exy = pair.at(0) - pair.at(1) - pair.at(2) + pair.at(3);
    double ex = pair.at(0) + pair.at(1) - pair.at(2) - pair.at(3);
    claim1.add((exy - target_corr) * (exy - target_corr));
    claim2.add(ex * ex);
  }
  const double scale = 1.0 / (2.0 * std::log(2.0));
  return ManouverCheck{scale * claim1.value(), scale * claim2.value()};
}

ProbabilityTable randomized_letter_joint(const RandomizedScheme& s, double p, int coord) {
  if (coord < 0 || coord >= s.n) {
    throw std::out_of_range("randomized_letter_joint: coordinate out of range");
  }
  const std::uint32_t space = std::uint32_t{1} << s.n;
  const int na = s.a_dist.shape()[0], nb = s.b_dist.shape()[0];
  const std::vector<double> fw = flip_weights(p, s.n);
  const double pu = 1.0 / static_cast<double>(space);
  std::vector<KahanSum> acc(static_cast<std::size_t>(4) * na * nb);
  for (int a = 0; a < na; ++a) {
    const std::vector<std::uint32_t> fm = s.f_by_a[a].index_map();
    for (int b = 0; b < nb; ++b) {
      const std::vector<std::uint32_t> gm = s.g_by_b[b].index_map();
      double wab = s.a_dist.at(a) * s.b_dist.at(b);
      if (wab == 0.0) continue;
      for (std::uint32_t u = 0; u < space; ++u) {
        for (std::uint32_t z = 0; z < space; ++z) {
          double w = wab * pu * fw[std::popcount(z)];
          if (w == 0.0) continue;
          int x = (fm[u] >> coord) & 1u;
          int y = (gm[u ^ z] >> coord) & 1u;
          acc[((static_cast<std::size_t>(x) * 2 + y) * na + a) * nb + b].add(w);
        }
      }
    }
  }
  std::vector<double> probs(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) probs[i] = acc[i].value();
  return ProbabilityTable({2, 2, na, nb}, std::move(probs));
}

ConditionalKernel side_kernel(const BooleanMap& m) {
  const std::uint32_t space = std::uint32_t{1} << m.n;
  const std::uint32_t out_space = std::uint32_t{1} << m.out_bits();
  std::vector<double> rows(static_cast<std::size_t>(space) * out_space, 0.0);
  const std::vector<std::uint32_t> map = m.index_map();
  for (std::uint32_t u = 0; u < space; ++u) {
    rows[static_cast<std::size_t>(u) * out_space + map[u]] = 1.0;
  }
  return ConditionalKernel(static_cast<int>(space), static_cast<int>(out_space),
                           std::move(rows));
}

ConditionalKernel side_kernel(const ProbabilityTable& dist,
                              const std::vector<BooleanMap>& by_symbol) {
  if (by_symbol.empty()) throw std::invalid_argument("side_kernel: empty map family");
  const int n = by_symbol.front().n;
  const std::uint32_t space = std::uint32_t{1} << n;
  std::vector<double> rows(static_cast<std::size_t>(space) * space, 0.0);
  for (std::size_t a = 0; a < by_symbol.size(); ++a) {
    double w = dist.at(a);
    if (w == 0.0) continue;
    const std::vector<std::uint32_t> map = by_symbol[a].index_map();
    for (std::uint32_t u = 0; u < space; ++u) {
      rows[static_cast<std::size_t>(u) * space + map[u]] += w;
    }
  }
  return ConditionalKernel(static_cast<int>(space), static_cast<int>(space),
                           std::move(rows));
}

}  // namespace dss
