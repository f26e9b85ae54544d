#include <doctest.h>

#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "dss/info_measures.hpp"
#include "dss/schemes.hpp"
#include "test_helpers.hpp"

using namespace dss;

namespace {

DeterministicScheme identity_scheme(int n) {
  return DeterministicScheme(BooleanMap::identity(n), BooleanMap::identity(n));
}

// Coupled (X, Y) in {+-1}^2 with given means and correlation; returns the
// four cell probabilities (++, +-, -+, --) or empty if infeasible.
std::vector<double> couple_pair(double mx, double my, double rho) {
  double exy = rho * std::sqrt((1 - mx * mx) * (1 - my * my)) + mx * my;
  std::array<double, 4> cells = {
      (1 + mx + my + exy) / 4, (1 + mx - my - exy) / 4,
      (1 - mx + my - exy) / 4, (1 - mx - my + exy) / 4};
  for (double c : cells) {
    if (c < 0.0) return {};
  }
  return {cells.begin(), cells.end()};
}

// Rejection-samples a joint satisfying the power-bound premises for p and
// returns it with the tightest eps (max of the three premise deviations).
struct AdmissibleJoint {
  ProbabilityTable joint;
  double eps;
};

AdmissibleJoint sample_admissible_joint(std::mt19937_64& rng, double p) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int na = 2 + static_cast<int>(rng() % 2);
  const int nb = 2 + static_cast<int>(rng() % 2);
  for (;;) {
    ProbabilityTable pa = test::random_table(rng, {na});
    ProbabilityTable pb = test::random_table(rng, {nb});
    std::vector<double> mx(na), my(nb);
    // Small per-symbol biases keep the premise eps in a useful range.
    for (double& m : mx) m = 0.3 * (2 * unit(rng) - 1);
    for (double& m : my) m = 0.3 * (2 * unit(rng) - 1);
    std::vector<double> probs(std::size_t(4) * na * nb);
    bool ok = true;
    for (int a = 0; a < na && ok; ++a) {
      for (int b = 0; b < nb && ok; ++b) {
        double rho = (1 - 2 * p) * (2 * unit(rng) - 1);
        std::vector<double> cells = couple_pair(mx[a], my[b], rho);
        if (cells.empty()) {
          ok = false;
          break;
        }
        double w = pa.at(a) * pb.at(b);
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y)
            probs[((std::size_t(x) * 2 + y) * na + a) * nb + b] =
                w * cells[std::size_t(x) * 2 + y];
      }
    }
    if (!ok) continue;
    ProbabilityTable joint({2, 2, na, nb}, std::move(probs));
    double ex = 0, ey = 0, exy = 0;
    std::vector<int> sym(4);
    for (std::size_t i = 0; i < joint.size(); ++i) {
      joint.decode(i, sym);
      double v = joint.at(i);
      double xv = sym[0] == 0 ? 1 : -1, yv = sym[1] == 0 ? 1 : -1;
      ex += v * xv;
      ey += v * yv;
      exy += v * xv * yv;
    }
    double eps = std::max({std::abs(ex), std::abs(ey), std::abs(exy - (1 - 2 * p))});
    if (eps >= 1.0) continue;
    return AdmissibleJoint{std::move(joint), eps};
  }
}

}  // namespace

TEST_CASE("induced joint") {
  SUBCASE("identity reproduces the source") {
    ProbabilityTable joint = induced_joint(identity_scheme(3), 0.1);
    ProbabilityTable expect = product_extend(dsbs(0.1), 3);
    REQUIRE(joint.shape() == expect.shape());
    for (std::size_t i = 0; i < joint.size(); ++i) {
      CHECK(std::abs(joint.at(i) - expect.at(i)) < 1e-12);
    }
  }
  SUBCASE("a shared signed permutation is exact") {
    std::mt19937_64 rng(3);
    BooleanMap m = test::random_signed_permutation(rng, 3).to_map();
    DeterministicScheme s(m, m);
    ProbabilityTable joint = induced_joint(s, 0.2);
    ProbabilityTable expect = product_extend(dsbs(0.2), 3);
    for (std::size_t i = 0; i < joint.size(); ++i) {
      CHECK(std::abs(joint.at(i) - expect.at(i)) < 1e-12);
    }
  }
  SUBCASE("global flip on one side turns p into 1-p") {
    BooleanMap flip(1, {BooleanFunction::dictator(1, 0, -1)});
    DeterministicScheme s(BooleanMap::identity(1), flip);
    ProbabilityTable joint = induced_joint(s, 0.1);
    ProbabilityTable expect = dsbs(0.9);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(std::abs(joint.at(i) - expect.at(i)) < 1e-12);
    }
  }
  SUBCASE("cap") {
    CHECK_THROWS_AS(induced_joint(identity_scheme(4), 0.1, 3), CapExceeded);
  }
}

TEST_CASE("randomized induced joint") {
  SUBCASE("singleton randomness reduces to deterministic") {
    std::mt19937_64 rng(5);
    BooleanMap f = test::random_boolean_map(rng, 2);
    BooleanMap g = test::random_boolean_map(rng, 2);
    RandomizedScheme rs(ProbabilityTable({1}, {1.0}), ProbabilityTable({1}, {1.0}),
                        {f}, {g});
    ProbabilityTable a = induced_joint(rs, 0.15);
    ProbabilityTable b = induced_joint(DeterministicScheme(f, g), 0.15);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(a.at(i) - b.at(i)) < 1e-12);
    }
  }
  SUBCASE("per-coordinate BSC noise convolves the flip probability") {
    const int n = 2;
    const double p = 0.1, q = 0.2;
    // B enumerates flip patterns with product-Bernoulli(q) weights;
    // g(., b) = XOR with the pattern.
    std::vector<double> b_probs(4);
    std::vector<BooleanMap> g_by_b;
    for (std::uint32_t b = 0; b < 4; ++b) {
      int ones = ((b >> 0) & 1) + ((b >> 1) & 1);
      b_probs[b] = std::pow(q, ones) * std::pow(1 - q, n - ones);
      std::vector<std::uint32_t> map(4);
      for (std::uint32_t v = 0; v < 4; ++v) map[v] = v ^ b;
      g_by_b.push_back(BooleanMap::from_index_map(n, map));
    }
    RandomizedScheme rs(ProbabilityTable({1}, {1.0}), ProbabilityTable({4}, b_probs),
                        {BooleanMap::identity(n)}, g_by_b);
    ProbabilityTable joint = induced_joint(rs, p);
    double conv = p * (1 - q) + q * (1 - p);
    ProbabilityTable expect = product_extend(dsbs(conv), n);
    for (std::size_t i = 0; i < joint.size(); ++i) {
      CHECK(std::abs(joint.at(i) - expect.at(i)) < 1e-12);
    }
  }
}

TEST_CASE("simulation divergence") {
  CHECK(simulation_divergence(identity_scheme(2), 0.1, 0.1) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(simulation_divergence(identity_scheme(1), 0.1, 0.2) -
                 0.052932501298081136) < 1e-12);
  SUBCASE("copying a coordinate is detectable") {
    // X = (U1, U1), Y = V: memory makes the divergence strictly positive.
    BooleanMap f(2, {BooleanFunction::dictator(2, 0), BooleanFunction::dictator(2, 0)});
    DeterministicScheme s(f, BooleanMap::identity(2));
    CHECK(simulation_divergence(s, 0.1, 0.1) > 0.1);
  }
}

TEST_CASE("hamming lower bound") {
  SUBCASE("identity at the same flip probability") {
    double b = hamming_lower_bound(identity_scheme(2), 0.1, 0.1);
    CHECK(std::abs(b) < 1e-12);
  }
  SUBCASE("bijection equality") {
    double div = simulation_divergence(identity_scheme(1), 0.1, 0.2);
    double b = hamming_lower_bound(identity_scheme(1), 0.1, 0.2);
    CHECK(std::abs(div - b) < 1e-10);
  }
  SUBCASE("non-injective maps fall strictly below") {
    BooleanMap constant(2, {BooleanFunction::constant(2, 1), BooleanFunction::constant(2, 1)});
    DeterministicScheme s(constant, BooleanMap::identity(2));
    double div = simulation_divergence(s, 0.1, 0.1);
    double b = hamming_lower_bound(s, 0.1, 0.1);
    CHECK(b < div - 1e-6);
  }
  CHECK_THROWS_AS(hamming_lower_bound(identity_scheme(1), 0.1, 0.0), std::domain_error);
  CHECK_THROWS_AS(hamming_lower_bound(identity_scheme(1), 0.1, 1.0), std::domain_error);
}

TEST_CASE("signed permutation recovery") {
  SUBCASE("identity") {
    auto sp = is_signed_permutation(BooleanMap::identity(3));
    REQUIRE(sp.has_value());
    CHECK(sp->sigma == std::vector<int>{0, 1, 2});
    for (auto s : sp->signs) CHECK(s == 1);
  }
  SUBCASE("swap with one flip") {
    SignedPermutation in;
    in.sigma = {1, 0};
    in.signs = {1, -1};
    auto sp = is_signed_permutation(in.to_map());
    REQUIRE(sp.has_value());
    CHECK(sp->sigma == in.sigma);
    CHECK(sp->signs == in.signs);
  }
  SUBCASE("products of coordinates are rejected") {
    BooleanMap m(2, {BooleanFunction::parity(2, 0x3), BooleanFunction::dictator(2, 1)});
    CHECK_FALSE(is_signed_permutation(m).has_value());
  }
  SUBCASE("repeated source coordinate is rejected") {
    BooleanMap m(2, {BooleanFunction::dictator(2, 0), BooleanFunction::dictator(2, 0)});
    CHECK_FALSE(is_signed_permutation(m).has_value());
  }
}

TEST_CASE("hamming preservation") {
  std::mt19937_64 rng(7);
  SUBCASE("signed permutations preserve") {
    CHECK(preserves_hamming(test::random_signed_permutation(rng, 3).to_map()));
  }
  SUBCASE("swapping two points does not") {
    std::vector<std::uint32_t> map = {1, 0, 2, 3};  // swaps 00 and 01 only
    CHECK_FALSE(preserves_hamming(BooleanMap::from_index_map(2, map)));
  }
  SUBCASE("non-bijections collapse a pair") {
    std::vector<std::uint32_t> map = {0, 0, 2, 3};
    CHECK_FALSE(preserves_hamming(BooleanMap::from_index_map(2, map)));
  }
  SUBCASE("cap") {
    CHECK_THROWS_AS(preserves_hamming(BooleanMap::identity(7)), CapExceeded);
  }
  SUBCASE("equivalence with the signed-permutation test, exhaustive n = 2") {
    std::vector<std::uint32_t> map = {0, 1, 2, 3};
    do {
      BooleanMap m = BooleanMap::from_index_map(2, map);
      CHECK(preserves_hamming(m) == is_signed_permutation(m).has_value());
    } while (std::next_permutation(map.begin(), map.end()));
  }
  SUBCASE("equivalence on random bijections, n = 3 and 4") {
    for (int it = 0; it < 300; ++it) {
      int n = 3 + (it & 1);
      BooleanMap m = test::random_bijection_map(rng, n);
      CHECK(preserves_hamming(m) == is_signed_permutation(m).has_value());
    }
    for (int it = 0; it < 50; ++it) {
      int n = 3 + (it & 1);
      BooleanMap m = test::random_signed_permutation(rng, n).to_map();
      CHECK(preserves_hamming(m));
      CHECK(is_signed_permutation(m).has_value());
    }
  }
}

TEST_CASE("level profile") {
  SUBCASE("signed permutation concentrates on level one") {
    std::mt19937_64 rng(11);
    BooleanMap m = test::random_signed_permutation(rng, 3).to_map();
    LevelProfile prof = level_profile(DeterministicScheme(m, m));
    for (const auto& c : prof.coords) {
      CHECK(c.w1_f == doctest::Approx(1.0));
      CHECK(c.w1_g == doctest::Approx(1.0));
      CHECK(c.dict_dist_f == doctest::Approx(0.0));
    }
    CHECK(prof.w0_sum == doctest::Approx(0.0));
    CHECK(prof.w1_deficit_sum == doctest::Approx(0.0));
  }
  SUBCASE("a parity output has empty first level") {
    BooleanMap f(2, {BooleanFunction::parity(2, 0x3), BooleanFunction::dictator(2, 1)});
    LevelProfile prof = level_profile(DeterministicScheme(f, BooleanMap::identity(2)));
    CHECK(prof.coords[0].w1_f == doctest::Approx(0.0));
    CHECK(prof.coords[1].w1_f == doctest::Approx(1.0));
  }
  SUBCASE("level bounds hold with eps set to the divergence") {
    std::mt19937_64 rng(13);
    for (int it = 0; it < 40; ++it) {
      int n = 2 + static_cast<int>(rng() % 2);
      double p = 0.1;
      DeterministicScheme s(test::perturbed_permutation(rng, n, 1),
                            test::perturbed_permutation(rng, n, 1));
      double eps = simulation_divergence(s, p, p);
      REQUIRE(std::isfinite(eps));
      LevelProfile prof = level_profile(s);
      CHECK(prof.w0_sum <= 4.0 * std::log(2.0) * eps + 1e-9);
      CHECK(prof.w1_deficit_sum <= 2.0 * eps / (p * (1 - 2 * p)) + 1e-9);
    }
  }
}

TEST_CASE("exact simulation structure, exhaustive n = 2") {
  const double p = 0.1;
  std::vector<std::uint32_t> fmap = {0, 1, 2, 3};
  ProbabilityTable target = product_extend(dsbs(p), 2);
  int zero_count = 0;
  do {
    BooleanMap f = BooleanMap::from_index_map(2, fmap);
    std::vector<std::uint32_t> gmap = {0, 1, 2, 3};
    do {
      BooleanMap g = BooleanMap::from_index_map(2, gmap);
      double div = kl_divergence(induced_joint(DeterministicScheme(f, g), p), target);
      bool zero = div <= 1e-10;
      bool same_signed_perm = fmap == gmap && is_signed_permutation(f).has_value();
      CHECK(zero == same_signed_perm);
      if (zero) ++zero_count;
    } while (std::next_permutation(gmap.begin(), gmap.end()));
  } while (std::next_permutation(fmap.begin(), fmap.end()));
  CHECK(zero_count == 8);  // 2^2 sign patterns times 2! coordinate orders
}

TEST_CASE("mostly bijective maps under small divergence") {
  std::mt19937_64 rng(17);
  const double p = 0.1;
  for (int it = 0; it < 30; ++it) {
    int n = 2 + static_cast<int>(rng() % 2);
    DeterministicScheme s(test::perturbed_permutation(rng, n, 1),
                          test::perturbed_permutation(rng, n, 1));
    double div = simulation_divergence(s, p, p);
    CHECK(mostly_bijection_probability(s.f) <= div + 1e-12);
    CHECK(mostly_bijection_probability(s.g) <= div + 1e-12);
  }
}

TEST_CASE("best scalar approximation") {
  SUBCASE("product of BSCs is exactly scalar") {
    // Kernel rows: independent per-coordinate flips with distinct biases.
    const int n = 3;
    const double flips[3] = {0.1, 0.2, 0.3};
    std::vector<double> rows(64);
    for (std::uint32_t u = 0; u < 8; ++u) {
      for (std::uint32_t x = 0; x < 8; ++x) {
        double pr = 1.0;
        for (int j = 0; j < n; ++j) {
          bool differ = ((u >> j) & 1) != ((x >> j) & 1);
          pr *= differ ? flips[j] : 1 - flips[j];
        }
        rows[std::size_t(u) * 8 + x] = pr;
      }
    }
    ScalarApproximation sa = best_scalar_approximation(ConditionalKernel(8, 8, rows));
    CHECK(sa.sigma.sigma == std::vector<int>{0, 1, 2});
    CHECK(sa.expected_tv < 1e-12);
    for (int j = 0; j < n; ++j) {
      CHECK(sa.scalar_kernels[j].at(0, 1) == doctest::Approx(flips[j]).epsilon(1e-9));
    }
  }
  SUBCASE("coordinate-permuted product kernel is recovered") {
    const int n = 3;
    const double flips[3] = {0.05, 0.15, 0.25};
    const int perm[3] = {2, 0, 1};  // x_j listens to u_{perm[j]}
    std::vector<double> rows(64);
    for (std::uint32_t u = 0; u < 8; ++u) {
      for (std::uint32_t x = 0; x < 8; ++x) {
        double pr = 1.0;
        for (int j = 0; j < n; ++j) {
          bool differ = ((u >> perm[j]) & 1) != ((x >> j) & 1);
          pr *= differ ? flips[j] : 1 - flips[j];
        }
        rows[std::size_t(u) * 8 + x] = pr;
      }
    }
    ScalarApproximation sa = best_scalar_approximation(ConditionalKernel(8, 8, rows));
    CHECK(sa.sigma.sigma == std::vector<int>{2, 0, 1});
    CHECK(sa.expected_tv < 1e-12);
  }
  SUBCASE("cap") {
    std::vector<double> rows = {1, 0, 0, 1};
    CHECK_THROWS_AS(best_scalar_approximation(ConditionalKernel(2, 2, rows), 0),
                    CapExceeded);
  }
}

TEST_CASE("conditional correlation") {
  SUBCASE("independent components give zeros") {
    // X, Y, A, B all independent, X and Y unbiased.
    std::vector<double> probs(16);
    double pa[2] = {0.3, 0.7}, pb[2] = {0.6, 0.4};
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            probs[((std::size_t(x) * 2 + y) * 2 + a) * 2 + b] =
                0.25 * pa[a] * pb[b];
    ConditionalCorrelation cc = conditional_correlation(ProbabilityTable({2, 2, 2, 2}, probs));
    for (std::size_t i = 0; i < cc.rho.size(); ++i) {
      CHECK_FALSE(cc.degenerate[i]);
      CHECK(std::abs(cc.rho[i]) < 1e-12);
    }
  }
  SUBCASE("perfect agreement gives ones") {
    std::vector<double> probs(16, 0.0);
    for (int x = 0; x < 2; ++x)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          probs[((std::size_t(x) * 2 + x) * 2 + a) * 2 + b] = 0.125;
    ConditionalCorrelation cc = conditional_correlation(ProbabilityTable({2, 2, 2, 2}, probs));
    CHECK(cc.max_rho() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("randomized schemes stay below the source correlation") {
    std::mt19937_64 rng(19);
    const double p = 0.1;
    for (int it = 0; it < 10; ++it) {
      const int n = 2;
      std::vector<BooleanMap> fs, gs;
      for (int a = 0; a < 2; ++a) fs.push_back(test::random_boolean_map(rng, n));
      for (int b = 0; b < 3; ++b) gs.push_back(test::random_boolean_map(rng, n));
      RandomizedScheme rs(test::random_table(rng, {2}), test::random_table(rng, {3}),
                          fs, gs);
      for (int coord = 0; coord < n; ++coord) {
        ConditionalCorrelation cc =
            conditional_correlation(randomized_letter_joint(rs, p, coord));
        CHECK(cc.max_rho() <= 1.0 - 2.0 * p + 1e-9);
      }
    }
  }
}

TEST_CASE("power bound") {
  SUBCASE("independent unbiased pair with matched correlation") {
    const double p = 0.1;
    // X, Y independent of (A, B), E X = E Y = 0, E XY = 1 - 2p.
    std::vector<double> cells = couple_pair(0.0, 0.0, 1 - 2 * p);
    REQUIRE_FALSE(cells.empty());
    std::vector<double> probs(16);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            probs[((std::size_t(x) * 2 + y) * 2 + a) * 2 + b] =
                cells[std::size_t(x) * 2 + y] * 0.25;
    PowerBoundCheck chk = power_bound_check(ProbabilityTable({2, 2, 2, 2}, probs), p, 1e-9);
    CHECK(chk.premises_hold);
    CHECK(chk.lhs <= chk.rhs + 1e-12);
    CHECK(chk.lhs < 1e-12);
  }
  SUBCASE("random admissible joints never violate the bound") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> pd(0.05, 0.45);
    for (int it = 0; it < 100; ++it) {
      double p = pd(rng);
      AdmissibleJoint aj = sample_admissible_joint(rng, p);
      PowerBoundCheck chk = power_bound_check(aj.joint, p, aj.eps);
      CHECK(chk.premises_hold);
      CHECK(chk.lhs <= chk.rhs + 1e-9);
    }
  }
  SUBCASE("premise violation is reported, not asserted") {
    const double p = 0.4;  // 1 - 2p = 0.2 < rho of the coupled pair below
    std::vector<double> cells = couple_pair(0.0, 0.0, 0.9);
    REQUIRE_FALSE(cells.empty());
    std::vector<double> probs(16);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            probs[((std::size_t(x) * 2 + y) * 2 + a) * 2 + b] =
                cells[std::size_t(x) * 2 + y] * 0.25;
    PowerBoundCheck chk = power_bound_check(ProbabilityTable({2, 2, 2, 2}, probs), p, 1.0);
    CHECK_FALSE(chk.premises_hold);
  }
}

TEST_CASE("manouver sums") {
  SUBCASE("exact product is zero") {
    ManouverCheck mc = manouver_check(product_extend(dsbs(0.1), 3), 0.1);
    CHECK(std::abs(mc.claim1_lhs) < 1e-12);
    CHECK(std::abs(mc.claim2_lhs) < 1e-12);
  }
  SUBCASE("identity scheme against a different target") {
    const double p = 0.1, q = 0.2;
    const int n = 2;
    ProbabilityTable joint = induced_joint(identity_scheme(n), p);
    ManouverCheck mc = manouver_check(joint, q);
    double expect = n * std::pow(2 * (q - p), 2) / (2 * std::log(2.0));
    CHECK(std::abs(mc.claim1_lhs - expect) < 1e-12);
    CHECK(std::abs(mc.claim2_lhs) < 1e-12);
  }
  SUBCASE("both claims are below the divergence") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> pd(0.05, 0.45);
    for (int it = 0; it < 100; ++it) {
      int n = 1 + static_cast<int>(rng() % 3);
      auto joint = test::random_table(rng, std::vector<int>(2 * n, 2));
      double q = pd(rng);
      double div = kl_divergence(joint, product_extend(dsbs(q), n));
      ManouverCheck mc = manouver_check(joint, q);
      CHECK(mc.claim1_lhs <= div + 1e-9);
      CHECK(mc.claim2_lhs <= div + 1e-9);
    }
  }
}

TEST_CASE("scheme json round trip") {
  std::mt19937_64 rng(31);
  DeterministicScheme s(test::random_boolean_map(rng, 3), test::random_boolean_map(rng, 3));
  DeterministicScheme back = DeterministicScheme::from_json(s.to_json());
  CHECK(back.n == s.n);
  for (int j = 0; j < 3; ++j) {
    CHECK(back.f.outputs[j].values == s.f.outputs[j].values);
    CHECK(back.g.outputs[j].values == s.g.outputs[j].values);
  }

  RandomizedScheme rs(ProbabilityTable({2}, {0.25, 0.75}), ProbabilityTable({1}, {1.0}),
                      {test::random_boolean_map(rng, 2), test::random_boolean_map(rng, 2)},
                      {test::random_boolean_map(rng, 2)});
  RandomizedScheme rback = RandomizedScheme::from_json(rs.to_json());
  CHECK(rback.n == rs.n);
  CHECK(rback.a_dist.probs() == rs.a_dist.probs());
  CHECK(rback.f_by_a[1].outputs[0].values == rs.f_by_a[1].outputs[0].values);
}
