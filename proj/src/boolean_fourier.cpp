#include "dss/boolean_fourier.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace dss {

namespace {

void require_power_of_two(std::size_t len, int n, const char* what) {
  if (n < 1 || n > 30 || len != (std::size_t{1} << n)) {
    throw std::invalid_argument(std::string(what) + ": table length must be 2^n");
  }
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw std::invalid_argument("truth table: invalid hex digit");
}

}  // namespace

BooleanFunction::BooleanFunction(int n_in, std::vector<std::int8_t> vals)
    : n(n_in), values(std::move(vals)) {
  require_power_of_two(values.size(), n, "BooleanFunction");
  for (std::int8_t v : values) {
    if (v != 1 && v != -1) {
      throw std::invalid_argument("BooleanFunction: entries must be +-1");
    }
  }
}

BooleanFunction BooleanFunction::constant(int n, int sign) {
  return BooleanFunction(n, std::vector<std::int8_t>(std::size_t{1} << n,
                                                     static_cast<std::int8_t>(sign)));
}

BooleanFunction BooleanFunction::dictator(int n, int coord, int sign) {
  std::vector<std::int8_t> vals(std::size_t{1} << n);
  for (std::uint32_t m = 0; m < vals.size(); ++m) {
    vals[m] = static_cast<std::int8_t>(sign * coord_value(m, coord));
  }
  return BooleanFunction(n, std::move(vals));
}

BooleanFunction BooleanFunction::parity(int n, std::uint32_t mask) {
  std::vector<std::int8_t> vals(std::size_t{1} << n);
  for (std::uint32_t m = 0; m < vals.size(); ++m) {
    vals[m] = std::popcount(m & mask) % 2 ? -1 : 1;
  }
  return BooleanFunction(n, std::move(vals));
}

BooleanFunction BooleanFunction::majority3() {
  std::vector<std::int8_t> vals(8);
  for (std::uint32_t m = 0; m < 8; ++m) {
    int s = coord_value(m, 0) + coord_value(m, 1) + coord_value(m, 2);
    vals[m] = s > 0 ? 1 : -1;
  }
  return BooleanFunction(3, std::move(vals));
}

std::string BooleanFunction::to_hex() const {
  const std::size_t digits = (size() + 3) / 4;
  std::string hex(digits, '0');
  for (std::size_t i = 0; i < size(); ++i) {
    if (values[i] == -1) {
      std::size_t digit = digits - 1 - i / 4;
      int cur = hex_digit(hex[digit]);
      cur |= 1 << (i % 4);
      hex[digit] = "0123456789abcdef"[cur];
    }
  }
  return hex;
}

BooleanFunction BooleanFunction::from_hex(int n, const std::string& hex) {
  const std::size_t len = std::size_t{1} << n;
  const std::size_t digits = (len + 3) / 4;
  if (hex.size() != digits) {
    throw std::invalid_argument("truth table: hex length must be 2^n / 4 digits");
  }
  std::vector<std::int8_t> vals(len);
  for (std::size_t i = 0; i < len; ++i) {
    int d = hex_digit(hex[digits - 1 - i / 4]);
    vals[i] = (d >> (i % 4)) & 1 ? -1 : 1;
  }
  return BooleanFunction(n, std::move(vals));
}

FourierSpectrum wht(int n, std::span<const double> values) {
  require_power_of_two(values.size(), n, "wht");
  std::vector<double> a(values.begin(), values.end());
  for (std::size_t len = 1; len < a.size(); len <<= 1) {
    for (std::size_t i = 0; i < a.size(); i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        double x = a[j], y = a[j + len];
        a[j] = x + y;
        a[j + len] = x - y;
      }
    }
  }
  const double scale = 1.0 / static_cast<double>(a.size());
  for (double& v : a) v *= scale;
  return FourierSpectrum{n, std::move(a)};
}

FourierSpectrum wht(const BooleanFunction& f) {
  std::vector<double> vals(f.values.begin(), f.values.end());
  return wht(f.n, vals);
}

std::vector<double> inverse_wht(const FourierSpectrum& spec) {
  std::vector<double> a = spec.coeffs;
  require_power_of_two(a.size(), spec.n, "inverse_wht");
  for (std::size_t len = 1; len < a.size(); len <<= 1) {
    for (std::size_t i = 0; i < a.size(); i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        double x = a[j], y = a[j + len];
        a[j] = x + y;
        a[j + len] = x - y;
      }
    }
  }
  return a;
}

double fourier_weight(const FourierSpectrum& spec, int k) {
  if (k < 0 || k > spec.n) throw std::domain_error("fourier_weight: level out of range");
  KahanSum w;
  for (std::uint32_t s = 0; s < spec.coeffs.size(); ++s) {
    if (std::popcount(s) == k) w.add(spec.coeffs[s] * spec.coeffs[s]);
  }
  return w.value();
}

double correlated_expectation(const BooleanFunction& f, const BooleanFunction& g,
                              double p) {
  if (f.n != g.n) throw std::invalid_argument("correlated_expectation: size mismatch");
  if (!(p >= 0.0 && p <= 0.5)) {
    throw std::domain_error("correlated_expectation: p must be in [0, 1/2]");
  }
  FourierSpectrum fs = wht(f);
  FourierSpectrum gs = wht(g);
  std::vector<double> pow_level(f.n + 1);
  pow_level[0] = 1.0;
  for (int k = 1; k <= f.n; ++k) pow_level[k] = pow_level[k - 1] * (1.0 - 2.0 * p);
  KahanSum e;
  for (std::uint32_t s = 0; s < fs.coeffs.size(); ++s) {
    e.add(pow_level[std::popcount(s)] * fs.coeffs[s] * gs.coeffs[s]);
  }
  return e.value();
}

double correlated_expectation_direct(const BooleanFunction& f, const BooleanFunction& g,
                                     double p, int cap_n) {
  if (f.n != g.n) throw std::invalid_argument("correlated_expectation_direct: size mismatch");
  if (f.n > cap_n) {
    throw CapExceeded("correlated_expectation_direct: n exceeds enumeration cap",
                      static_cast<std::size_t>(f.n), static_cast<std::size_t>(cap_n));
  }
  const std::uint32_t space = std::uint32_t{1} << f.n;
  // Flip-pattern weights p^|z| (1-p)^{n-|z|}; v = u XOR z in index space.
  std::vector<double> flip_weight(f.n + 1);
  for (int k = 0; k <= f.n; ++k) {
    flip_weight[k] = std::pow(p, k) * std::pow(1.0 - p, f.n - k);
  }
  const double pu = 1.0 / static_cast<double>(space);
  KahanSum e;
  for (std::uint32_t z = 0; z < space; ++z) {
    double w = flip_weight[std::popcount(z)];
    if (w == 0.0) continue;
    KahanSum inner;
    for (std::uint32_t u = 0; u < space; ++u) {
      inner.add(static_cast<double>(f.values[u]) * g.values[u ^ z]);
    }
    e.add(pu * w * inner.value());
  }
  return e.value();
}

double corrbound_rhs(const BooleanFunction& f, const BooleanFunction& g, double p) {
  if (f.n != g.n) throw std::invalid_argument("corrbound_rhs: size mismatch");
  FourierSpectrum fs = wht(f);
  FourierSpectrum gs = wht(g);
  KahanSum rhs;
  double pw = 1.0;
  for (int k = 0; k <= f.n; ++k) {
    rhs.add(0.5 * pw * (fourier_weight(fs, k) + fourier_weight(gs, k)));
    pw *= 1.0 - 2.0 * p;
  }
  return rhs.value();
}

DictatorDistance dictator_distance(const BooleanFunction& f) {
  FourierSpectrum spec = wht(f);
  int best = 0;
  double best_abs = -1.0;
  for (int j = 0; j < f.n; ++j) {
    double c = std::abs(spec.coeffs[std::uint32_t{1} << j]);
    if (c > best_abs + 1e-15) {
      best_abs = c;
      best = j;
    }
  }
  double coeff = spec.coeffs[std::uint32_t{1} << best];
  int sign = coeff >= 0.0 ? 1 : -1;
  return DictatorDistance{best, sign, (1.0 - std::abs(coeff)) / 2.0};
}

}  // namespace dss
