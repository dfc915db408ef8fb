#include "dsts/simd/kernels.hpp"

namespace dsts::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sum_sq_dev_scalar(const double* x, double center, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - center;
    acc += d * d;
  }
  return acc;
}

void affine_scalar(const double* x, double scale, double shift, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = scale * x[i] + shift;
}

constexpr Kernels kScalar{Isa::Scalar, dot_scalar, axpy_scalar, sum_scalar, sum_sq_dev_scalar,
                          affine_scalar};

}  // namespace

const Kernels& scalar_kernels() noexcept { return kScalar; }

}  // namespace dsts::simd
