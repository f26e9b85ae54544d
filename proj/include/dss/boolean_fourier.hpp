#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dss/numeric.hpp"

namespace dss {

// A Boolean function on {-1,+1}^n stored as a truth table of 2^n entries.
// Input encoding: bit j of the table index carries coordinate j, with
// bit 0 -> u_j = +1 and bit 1 -> u_j = -1. XOR of index bits therefore
// corresponds to products of the +-1 coordinate values.
struct BooleanFunction {
  int n;
  std::vector<std::int8_t> values;

  BooleanFunction(int n_in, std::vector<std::int8_t> vals);

  std::size_t size() const { return values.size(); }

  static int coord_value(std::uint32_t index, int coord) {
    return (index >> coord) & 1u ? -1 : 1;
  }

  static BooleanFunction constant(int n, int sign);
  static BooleanFunction dictator(int n, int coord, int sign = 1);
  // Parity (product of +-1 values) over the coordinates in mask.
  static BooleanFunction parity(int n, std::uint32_t mask);
  static BooleanFunction majority3();

  // Truth-table file format: the 2^n value bits packed into one hex string
  // (most significant digit first); bit index = input index, bit 1 -> -1.
  std::string to_hex() const;
  static BooleanFunction from_hex(int n, const std::string& hex);
};

// Walsh-Hadamard coefficients indexed by subset bitmask S; coeffs[S] is the
// coefficient of the parity over S.
struct FourierSpectrum {
  int n;
  std::vector<double> coeffs;
};

// Forward transform with 2^-n normalization: coeffs[S] = E[f(U) U^S].
// Butterfly, O(n 2^n); bitwise deterministic.
FourierSpectrum wht(const BooleanFunction& f);
FourierSpectrum wht(int n, std::span<const double> values);

// Reconstructs the function table from its spectrum exactly.
std::vector<double> inverse_wht(const FourierSpectrum& spec);

// W^k = sum over |S| = k of coeffs[S]^2.
double fourier_weight(const FourierSpectrum& spec, int k);

// E[f(U^n) g(V^n)] for (U,V) ~ DSBS(p)^n, via the spectra:
// sum_S (1-2p)^{|S|} f_S g_S.
double correlated_expectation(const BooleanFunction& f, const BooleanFunction& g,
                              double p);

// Brute-force oracle for the same expectation, enumerating all 4^n pairs.
double correlated_expectation_direct(const BooleanFunction& f, const BooleanFunction& g,
                                     double p, int cap_n = 12);

// Upper bound 0.5 * sum_k (1-2p)^k (W^k[f] + W^k[g]); dominates the
// correlated expectation, with equality when f = g.
double corrbound_rhs(const BooleanFunction& f, const BooleanFunction& g, double p);

// Closest signed dictator: minimizes Pr(f(U^n) != sign * U_coord) under the
// uniform distribution. dist = (1 - max_j |f_{j}|) / 2. Ties break to the
// smallest coordinate, then positive sign.
struct DictatorDistance {
  int coord;
  int sign;
  double dist;
};

DictatorDistance dictator_distance(const BooleanFunction& f);

}  // namespace dss
