#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vdfp {

inline std::string shape_str(const std::vector<int>& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << ',';
    os << s[i];
  }
  os << ']';
  return os.str();
}

// Dense row-major array of 64-bit floats. Rank 1..3 covers every op here.
struct Array {
  std::vector<int> shape;
  std::vector<double> data;

  Array() = default;
  Array(std::vector<int> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
    if (static_cast<std::int64_t>(data.size()) != numel(shape))
      throw std::invalid_argument("Array: data length " + std::to_string(data.size()) +
                                  " does not match shape " + shape_str(shape));
  }

  static std::int64_t numel(const std::vector<int>& s) {
    std::int64_t n = 1;
    for (int d : s) {
      if (d <= 0) throw std::invalid_argument("Array: non-positive dim in shape " + shape_str(s));
      n *= d;
    }
    return n;
  }

  static Array zeros(std::vector<int> s) {
    std::int64_t n = numel(s);
    return Array(std::move(s), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  }

  static Array full(std::vector<int> s, double v) {
    std::int64_t n = numel(s);
    return Array(std::move(s), std::vector<double>(static_cast<std::size_t>(n), v));
  }

  static Array scalar(double v) { return Array({1}, {v}); }

  static Array vec(std::vector<double> v) {
    int n = static_cast<int>(v.size());
    return Array({n}, std::move(v));
  }

  std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }
  int rank() const { return static_cast<int>(shape.size()); }

  int rows() const { return rank() == 2 ? shape[0] : (rank() == 1 ? 1 : -1); }
  int cols() const { return rank() == 2 ? shape[1] : (rank() == 1 ? shape[0] : -1); }

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * shape[1] + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * shape[1] + j]; }

  bool same_shape(const Array& o) const { return shape == o.shape; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

}  // namespace vdfp
