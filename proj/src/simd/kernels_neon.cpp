// AArch64 Advanced SIMD variant. NEON is mandatory on AArch64, so no runtime probe.
#include <arm_neon.h>

#include "dsts/simd/kernels.hpp"

namespace dsts::simd {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double sum_sq_dev_neon(const double* x, double center, std::size_t n) {
  const float64x2_t c = vdupq_n_f64(center);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x + i), c);
    acc = vfmaq_f64(acc, d, d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = x[i] - center;
    s += d * d;
  }
  return s;
}

void affine_neon(const double* x, double scale, double shift, double* y, std::size_t n) {
  const float64x2_t s = vdupq_n_f64(scale);
  const float64x2_t b = vdupq_n_f64(shift);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(b, s, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = scale * x[i] + shift;
}

constexpr Kernels kNeon{Isa::Neon, dot_neon, axpy_neon, sum_neon, sum_sq_dev_neon, affine_neon};

}  // namespace

const Kernels* neon_kernels() noexcept { return &kNeon; }

}  // namespace dsts::simd
