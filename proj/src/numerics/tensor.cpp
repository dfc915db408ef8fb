#include "dsts/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dsts/error.hpp"
#include "dsts/simd/kernels.hpp"

namespace dsts {

std::string shape_to_string(const Shape& shape) { return fmt::format("[{}]", fmt::join(shape, ",")); }

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), data_(shape_numel(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_numel(shape_)) {
    throw ShapeError(fmt::format("tensor of shape {} needs {} values, got {}", shape_to_string(shape_),
                                 shape_numel(shape_), data_.size()));
  }
}

Tensor Tensor::vector(std::span<const double> values) {
  return Tensor(Shape{values.size()}, std::vector<double>(values.begin(), values.end()));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t m = rows.size();
  const std::size_t n = m == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(m * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw ShapeError("ragged rows in Tensor::matrix");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor(Shape{m, n}, std::move(data));
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw ShapeError(fmt::format("axis {} out of range for shape {}", axis, shape_to_string(shape_)));
  }
  return shape_[axis];
}

std::size_t Tensor::offset(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) {
    throw ShapeError(fmt::format("index of rank {} for tensor of shape {}", index.size(),
                                 shape_to_string(shape_)));
  }
  std::size_t flat = 0;
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    if (index[a] >= shape_[a]) {
      throw ShapeError(fmt::format("index [{}] out of range for shape {}", fmt::join(index, ","),
                                   shape_to_string(shape_)));
    }
    flat = flat * shape_[a] + index[a];
  }
  return flat;
}

double& Tensor::at(std::initializer_list<std::size_t> index) {
  return data_[offset(std::span<const std::size_t>(index.begin(), index.size()))];
}

double Tensor::at(std::initializer_list<std::size_t> index) const {
  return data_[offset(std::span<const std::size_t>(index.begin(), index.size()))];
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_numel(shape) != data_.size()) {
    throw ShapeError(fmt::format("cannot reshape {} to {}", shape_to_string(shape_), shape_to_string(shape)));
  }
  return Tensor(std::move(shape), data_);
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.shape()[1] != b.shape()[0]) {
    throw ShapeError(fmt::format("matmul shape mismatch: {} x {}", shape_to_string(a.shape()),
                                 shape_to_string(b.shape())));
  }
  const std::size_t m = a.shape()[0];
  const std::size_t k = a.shape()[1];
  const std::size_t n = b.shape()[1];
  Tensor out(Shape{m, n}, 0.0);
  const auto& kern = simd::active();
  const double* bd = b.data().data();
  double* od = out.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      kern.axpy(a[i * k + p], bd + p * n, od + i * n, n);
    }
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2) throw ShapeError("transpose expects rank 2, got " + shape_to_string(a.shape()));
  const std::size_t m = a.shape()[0];
  const std::size_t n = a.shape()[1];
  Tensor out(Shape{n, m});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a[i * n + j];
  return out;
}

Tensor reduce(const Tensor& x, std::size_t axis, ReduceKind kind) {
  if (axis >= x.rank()) {
    throw ShapeError(fmt::format("reduce axis {} out of range for shape {}", axis, shape_to_string(x.shape())));
  }
  const std::size_t len = x.shape()[axis];
  if (len == 0 && kind != ReduceKind::Sum) {
    throw DegenerateInputError("mean/max reduction over an empty axis");
  }
  std::size_t outer = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= x.shape()[a];
  std::size_t inner_len = 1;
  for (std::size_t a = axis + 1; a < x.rank(); ++a) inner_len *= x.shape()[a];

  Shape out_shape = x.shape();
  out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  Tensor out(out_shape, 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner_len; ++i) {
      const std::size_t base = o * len * inner_len + i;
      double acc = kind == ReduceKind::Max ? x[base] : 0.0;
      for (std::size_t r = 0; r < len; ++r) {
        const double v = x[base + r * inner_len];
        acc = kind == ReduceKind::Max ? std::max(acc, v) : acc + v;
      }
      if (kind == ReduceKind::Mean) acc /= static_cast<double>(len);
      out[o * inner_len + i] = acc;
    }
  }
  return out;
}

namespace {
void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(fmt::format("{}: shape mismatch {} vs {}", op, shape_to_string(a.shape()),
                                 shape_to_string(b.shape())));
  }
}
}  // namespace

Tensor operator+(const Tensor& a, const Tensor& b) {
  Tensor out = a;
  out += b;
  return out;
}

Tensor operator-(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "operator-");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

Tensor operator*(double s, const Tensor& a) {
  Tensor out = a;
  for (double& v : out.data()) v *= s;
  return out;
}

Tensor operator+(const Tensor& a, double s) {
  Tensor out = a;
  for (double& v : out.data()) v += s;
  return out;
}

Tensor& operator+=(Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "operator+=");
  simd::axpy(1.0, b.data(), a.data());
  return a;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "hadamard");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

double sum(const Tensor& a) { return simd::sum(a.data()); }

double inner(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "inner");
  return simd::dot(a.data(), b.data());
}

}  // namespace dsts
