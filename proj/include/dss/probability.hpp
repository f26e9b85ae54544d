#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "dss/numeric.hpp"

namespace dss {

// Exact finite pmf over an indexed alphabet. Coordinates form a tuple
// alphabet; storage is dense row-major with the LAST coordinate fastest.
// Construction rejects tables that do not sum to one (tolerance 1e-12) or
// carry negative entries; there is no silent renormalization.
class ProbabilityTable {
 public:
  ProbabilityTable(std::vector<int> shape, std::vector<double> probs);

  const std::vector<int>& shape() const { return shape_; }
  int num_coords() const { return static_cast<int>(shape_.size()); }
  std::size_t size() const { return probs_.size(); }
  double at(std::size_t flat) const { return probs_[flat]; }
  const std::vector<double>& probs() const { return probs_; }

  std::size_t index_of(std::span<const int> symbols) const;
  void decode(std::size_t flat, std::span<int> symbols_out) const;

  // Marginal over the listed coordinates, in the listed order.
  ProbabilityTable marginal(std::span<const int> coords) const;

  nlohmann::ordered_json to_json() const;
  static ProbabilityTable from_json(const nlohmann::json& j);

 private:
  std::vector<int> shape_;
  std::vector<std::size_t> strides_;
  std::vector<double> probs_;
};

// Row-stochastic conditional pmf p(out | in); each row is a valid marginal.
class ConditionalKernel {
 public:
  ConditionalKernel(int in_size, int out_size, std::vector<double> probs);

  int in_size() const { return in_size_; }
  int out_size() const { return out_size_; }
  double at(int in, int out) const {
    return probs_[static_cast<std::size_t>(in) * out_size_ + out];
  }
  std::span<const double> row(int in) const {
    return {probs_.data() + static_cast<std::size_t>(in) * out_size_,
            static_cast<std::size_t>(out_size_)};
  }

  nlohmann::ordered_json to_json() const;
  static ConditionalKernel from_json(const nlohmann::json& j);

 private:
  int in_size_;
  int out_size_;
  std::vector<double> probs_;
};

// i.i.d. n-fold product; the factor's coordinates repeat n times in order.
ProbabilityTable product_extend(const ProbabilityTable& p, int n,
                                std::size_t cap = kDefaultCellCap);

// Doubly symmetric binary source: uniform (U,V) with Pr(U != V) = p.
ProbabilityTable dsbs(double p);

// Combine two pair joints into one pair joint over the product alphabets,
// grouping the first coordinates together and the second coordinates
// together: r((x1,x2),(y1,y2)) = a(x1,y1) * b(x2,y2).
ProbabilityTable tensor_pair(const ProbabilityTable& a, const ProbabilityTable& b);

// Collapse a 2n-coordinate pair-interleaved joint (x1,y1,...,xn,yn) to a
// two-coordinate joint over composite symbols (x1..xn) and (y1..yn).
ProbabilityTable pair_grouped(const ProbabilityTable& joint_n);

// Deterministic per-side relabeling of a pair joint.
ProbabilityTable pushforward_pair(const ProbabilityTable& joint,
                                  std::span<const int> f_map, int f_card,
                                  std::span<const int> g_map, int g_card);

}  // namespace dss
