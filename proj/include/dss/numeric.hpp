#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace dss {

// Tolerance for "sums to one" validation of probability data.
inline constexpr double kProbTol = 1e-12;

// Default cap on dense table cells (product extensions, enumerations).
inline constexpr std::size_t kDefaultCellCap = std::size_t{1} << 26;

// Thrown when an exact enumeration would exceed its configured cap.
class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(std::string what, std::size_t requested, std::size_t cap)
      : std::runtime_error(std::move(what)), requested_(requested), cap_(cap) {}
  std::size_t requested() const { return requested_; }
  std::size_t cap() const { return cap_; }

 private:
  std::size_t requested_;
  std::size_t cap_;
};

// Neumaier compensated summation. Enumeration sums must not depend on
// traversal order beyond float associativity noise.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

}  // namespace dss
