#include "treentail/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "treentail/error.hpp"

namespace treentail {

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require_shape(data_.size() == rows * cols, "tensor data length does not match shape");
}

Tensor Tensor::column(std::initializer_list<double> values) {
  return column(std::vector<double>(values));
}

Tensor Tensor::column(std::vector<double> values) {
  const auto n = values.size();
  return Tensor(n, 1, std::move(values));
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Tensor& Tensor::operator+=(const Tensor& o) {
  require_shape(same_shape(o), "add " + o.shape_string() + " into " + shape_string());
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (auto& x : data_) x *= s;
  return *this;
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

std::string Tensor::shape_string() const {
  return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

void require_shape(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::ShapeMismatch, what);
}

Tensor apply(const AffineMap& map, const Tensor& x) {
  require_shape(x.is_column() && x.rows() == map.in() && map.bias.rows() == map.out(),
                "affine " + map.weight.shape_string() + " applied to " + x.shape_string());
  Tensor y = map.bias;
  for (std::size_t i = 0; i < map.out(); ++i) {
    double acc = 0.0;
    const auto w = map.weight.row(i);
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * x[j];
    y[i] += acc;
  }
  return y;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_shape(a.cols() == b.rows(), "matmul " + a.shape_string() + " * " + b.shape_string());
  Tensor c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double aip = a(i, p);
      if (aip == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aip * b(p, j);
    }
  return c;
}

Tensor transpose(const Tensor& a) {
  Tensor t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Tensor softmax(const Tensor& v) {
  if (v.empty()) throw Error(Errc::EmptyVector, "softmax of an empty vector");
  Tensor out = v;
  const double mx = *std::max_element(v.data().begin(), v.data().end());
  double total = 0.0;
  for (auto& x : out.data()) {
    x = std::exp(x - mx);
    total += x;
  }
  for (auto& x : out.data()) x /= total;
  return out;
}

}  // namespace treentail
