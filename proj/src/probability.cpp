#include "dss/probability.hpp"

#include <cmath>
#include <stdexcept>

namespace dss {

namespace {

std::vector<std::size_t> make_strides(const std::vector<int>& shape) {
  std::vector<std::size_t> strides(shape.size());
  std::size_t acc = 1;
  for (std::size_t i = shape.size(); i-- > 0;) {
    strides[i] = acc;
    acc *= static_cast<std::size_t>(shape[i]);
  }
  return strides;
}

std::size_t shape_cells(const std::vector<int>& shape) {
  std::size_t cells = 1;
  for (int s : shape) {
    if (s <= 0) throw std::invalid_argument("alphabet sizes must be positive");
    cells *= static_cast<std::size_t>(s);
  }
  return cells;
}

void validate_pmf(std::span<const double> probs, const char* what) {
  KahanSum sum;
  for (double v : probs) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument(std::string(what) + ": negative or NaN entry");
    }
    sum.add(v);
  }
  if (std::abs(sum.value() - 1.0) > kProbTol) {
    throw std::invalid_argument(std::string(what) + ": entries sum to " +
                                std::to_string(sum.value()) + ", not 1");
  }
}

}  // namespace

ProbabilityTable::ProbabilityTable(std::vector<int> shape, std::vector<double> probs)
    : shape_(std::move(shape)), strides_(make_strides(shape_)), probs_(std::move(probs)) {
  if (shape_.empty()) throw std::invalid_argument("ProbabilityTable: empty shape");
  if (probs_.size() != shape_cells(shape_)) {
    throw std::invalid_argument("ProbabilityTable: probs length does not match shape");
  }
  validate_pmf(probs_, "ProbabilityTable");
}

std::size_t ProbabilityTable::index_of(std::span<const int> symbols) const {
  if (symbols.size() != shape_.size()) {
    throw std::invalid_argument("index_of: wrong coordinate count");
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] < 0 || symbols[i] >= shape_[i]) {
      throw std::out_of_range("index_of: symbol out of range");
    }
    idx += strides_[i] * static_cast<std::size_t>(symbols[i]);
  }
  return idx;
}

void ProbabilityTable::decode(std::size_t flat, std::span<int> symbols_out) const {
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    symbols_out[i] = static_cast<int>((flat / strides_[i]) %
                                      static_cast<std::size_t>(shape_[i]));
  }
}

ProbabilityTable ProbabilityTable::marginal(std::span<const int> coords) const {
  if (coords.empty()) throw std::invalid_argument("marginal: no coordinates");
  std::vector<int> out_shape;
  out_shape.reserve(coords.size());
  for (int c : coords) {
    if (c < 0 || c >= num_coords()) throw std::out_of_range("marginal: bad coordinate");
    out_shape.push_back(shape_[c]);
  }
  std::vector<std::size_t> out_strides = make_strides(out_shape);
  std::vector<KahanSum> acc(shape_cells(out_shape));
  std::vector<int> sym(shape_.size());
  for (std::size_t flat = 0; flat < probs_.size(); ++flat) {
    if (probs_[flat] == 0.0) continue;
    decode(flat, sym);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      idx += out_strides[i] * static_cast<std::size_t>(sym[coords[i]]);
    }
    acc[idx].add(probs_[flat]);
  }
  std::vector<double> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = acc[i].value();
  return ProbabilityTable(std::move(out_shape), std::move(out));
}

nlohmann::ordered_json ProbabilityTable::to_json() const {
  nlohmann::ordered_json j;
  j["shape"] = shape_;
  j["probs"] = probs_;
  return j;
}

ProbabilityTable ProbabilityTable::from_json(const nlohmann::json& j) {
  if (!j.contains("shape") || !j.contains("probs")) {
    throw std::invalid_argument("table JSON requires fields \"shape\" and \"probs\"");
  }
  return ProbabilityTable(j.at("shape").get<std::vector<int>>(),
                          j.at("probs").get<std::vector<double>>());
}

ConditionalKernel::ConditionalKernel(int in_size, int out_size, std::vector<double> probs)
    : in_size_(in_size), out_size_(out_size), probs_(std::move(probs)) {
  if (in_size_ <= 0 || out_size_ <= 0) {
    throw std::invalid_argument("ConditionalKernel: sizes must be positive");
  }
  if (probs_.size() != static_cast<std::size_t>(in_size_) * out_size_) {
    throw std::invalid_argument("ConditionalKernel: probs length does not match sizes");
  }
  for (int u = 0; u < in_size_; ++u) {
    validate_pmf(row(u), "ConditionalKernel row");
  }
}

nlohmann::ordered_json ConditionalKernel::to_json() const {
  nlohmann::ordered_json j;
  j["shape"] = std::vector<int>{in_size_, out_size_};
  j["probs"] = probs_;
  return j;
}

ConditionalKernel ConditionalKernel::from_json(const nlohmann::json& j) {
  auto shape = j.at("shape").get<std::vector<int>>();
  if (shape.size() != 2) {
    throw std::invalid_argument("kernel JSON shape must be [in_size, out_size]");
  }
  return ConditionalKernel(shape[0], shape[1], j.at("probs").get<std::vector<double>>());
}

ProbabilityTable product_extend(const ProbabilityTable& p, int n, std::size_t cap) {
  if (n < 1) throw std::invalid_argument("product_extend: n must be >= 1");
  double cells_est = 1.0;
  for (int i = 0; i < n; ++i) cells_est *= static_cast<double>(p.size());
  if (cells_est > static_cast<double>(cap)) {
    throw CapExceeded("product_extend: table would exceed cell cap",
                      static_cast<std::size_t>(cells_est), cap);
  }
  std::vector<int> shape;
  shape.reserve(static_cast<std::size_t>(n) * p.num_coords());
  for (int i = 0; i < n; ++i) {
    shape.insert(shape.end(), p.shape().begin(), p.shape().end());
  }
  std::vector<double> probs{1.0};
  for (int i = 0; i < n; ++i) {
    std::vector<double> next(probs.size() * p.size());
    std::size_t k = 0;
    for (double a : probs) {
      for (std::size_t b = 0; b < p.size(); ++b) next[k++] = a * p.at(b);
    }
    probs.swap(next);
  }
  return ProbabilityTable(std::move(shape), std::move(probs));
}

ProbabilityTable dsbs(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("dsbs: p must be in [0,1]");
  return ProbabilityTable({2, 2}, {(1 - p) / 2, p / 2, p / 2, (1 - p) / 2});
}

ProbabilityTable tensor_pair(const ProbabilityTable& a, const ProbabilityTable& b) {
  if (a.num_coords() != 2 || b.num_coords() != 2) {
    throw std::invalid_argument("tensor_pair: expects two-coordinate joints");
  }
  const int ax = a.shape()[0], ay = a.shape()[1];
  const int bx = b.shape()[0], by = b.shape()[1];
  std::vector<double> out(static_cast<std::size_t>(ax) * ay * bx * by);
  for (int x1 = 0; x1 < ax; ++x1)
    for (int x2 = 0; x2 < bx; ++x2)
      for (int y1 = 0; y1 < ay; ++y1)
        for (int y2 = 0; y2 < by; ++y2) {
          std::size_t xi = static_cast<std::size_t>(x1) * bx + x2;
          std::size_t yi = static_cast<std::size_t>(y1) * by + y2;
          out[xi * (static_cast<std::size_t>(ay) * by) + yi] =
              a.at(static_cast<std::size_t>(x1) * ay + y1) *
              b.at(static_cast<std::size_t>(x2) * by + y2);
        }
  return ProbabilityTable({ax * bx, ay * by}, std::move(out));
}

ProbabilityTable pair_grouped(const ProbabilityTable& joint_n) {
  const int coords = joint_n.num_coords();
  if (coords % 2 != 0) {
    throw std::invalid_argument("pair_grouped: coordinate count must be even");
  }
  const int n = coords / 2;
  std::size_t x_card = 1, y_card = 1;
  for (int i = 0; i < n; ++i) {
    x_card *= static_cast<std::size_t>(joint_n.shape()[2 * i]);
    y_card *= static_cast<std::size_t>(joint_n.shape()[2 * i + 1]);
  }
  std::vector<KahanSum> acc(x_card * y_card);
  std::vector<int> sym(coords);
  for (std::size_t flat = 0; flat < joint_n.size(); ++flat) {
    if (joint_n.at(flat) == 0.0) continue;
    joint_n.decode(flat, sym);
    std::size_t xi = 0, yi = 0;
    for (int i = 0; i < n; ++i) {
      xi = xi * static_cast<std::size_t>(joint_n.shape()[2 * i]) + sym[2 * i];
      yi = yi * static_cast<std::size_t>(joint_n.shape()[2 * i + 1]) + sym[2 * i + 1];
    }
    acc[xi * y_card + yi].add(joint_n.at(flat));
  }
  std::vector<double> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = acc[i].value();
  return ProbabilityTable({static_cast<int>(x_card), static_cast<int>(y_card)},
                          std::move(out));
}

ProbabilityTable pushforward_pair(const ProbabilityTable& joint,
                                  std::span<const int> f_map, int f_card,
                                  std::span<const int> g_map, int g_card) {
  if (joint.num_coords() != 2) {
    throw std::invalid_argument("pushforward_pair: expects a two-coordinate joint");
  }
  const int nx = joint.shape()[0], ny = joint.shape()[1];
  if (static_cast<int>(f_map.size()) != nx || static_cast<int>(g_map.size()) != ny) {
    throw std::invalid_argument("pushforward_pair: relabeling size mismatch");
  }
  std::vector<KahanSum> acc(static_cast<std::size_t>(f_card) * g_card);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      double v = joint.at(static_cast<std::size_t>(x) * ny + y);
      if (v == 0.0) continue;
      acc[static_cast<std::size_t>(f_map[x]) * g_card + g_map[y]].add(v);
    }
  }
  std::vector<double> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = acc[i].value();
  return ProbabilityTable({f_card, g_card}, std::move(out));
}

}  // namespace dss
