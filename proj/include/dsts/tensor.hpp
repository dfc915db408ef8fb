#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace dsts {

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

/// Dense row-major array of doubles with an explicit shape.
///
/// A rank-0 tensor holds exactly one element. Tensors are plain values:
/// copying duplicates the storage and nothing is shared behind the scenes.
class Tensor {
 public:
  Tensor() : Tensor(Shape{}, 0.0) {}
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape), 0.0); }
  static Tensor scalar(double v) { return Tensor(Shape{}, v); }
  /// 1-D tensor holding a copy of `values`.
  static Tensor vector(std::span<const double> values);
  /// 2-D tensor from nested rows; all rows must have equal length.
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t dim(std::size_t axis) const;

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  double& operator[](std::size_t flat) noexcept { return data_[flat]; }
  double operator[](std::size_t flat) const noexcept { return data_[flat]; }

  /// Row-major flat offset of a multi-index; throws ShapeError when out of range.
  std::size_t offset(std::span<const std::size_t> index) const;
  double& at(std::initializer_list<std::size_t> index);
  double at(std::initializer_list<std::size_t> index) const;

  /// Same data under a new shape of equal element count.
  Tensor reshaped(Shape shape) const;

  bool all_finite() const noexcept;

  friend bool operator==(const Tensor& a, const Tensor& b) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Tensor of the given shape with every element equal to `fill`.
inline Tensor tensor_create(Shape shape, double fill) { return Tensor(std::move(shape), fill); }

/// Standard matrix product of a[m,k] and b[k,n].
Tensor matmul(const Tensor& a, const Tensor& b);

/// Transpose of a rank-2 tensor.
Tensor transpose(const Tensor& a);

enum class ReduceKind { Sum, Mean, Max };

/// Reduces `x` along `axis`, removing that axis from the shape.
Tensor reduce(const Tensor& x, std::size_t axis, ReduceKind kind);

// Scalar-tensor and same-shape elementwise arithmetic. No broadcasting.
Tensor operator+(const Tensor& a, const Tensor& b);
Tensor operator-(const Tensor& a, const Tensor& b);
Tensor operator*(double s, const Tensor& a);
Tensor operator+(const Tensor& a, double s);
Tensor& operator+=(Tensor& a, const Tensor& b);

/// Elementwise (Hadamard) product of equally shaped tensors.
Tensor hadamard(const Tensor& a, const Tensor& b);

/// Sum over all elements.
double sum(const Tensor& a);
/// Sum of elementwise products of equally shaped tensors.
double inner(const Tensor& a, const Tensor& b);

}  // namespace dsts
