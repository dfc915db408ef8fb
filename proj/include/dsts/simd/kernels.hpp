#pragma once

// Inner-loop kernels used by the tensor, layer, and loss code.
//
// Every kernel has a scalar reference implementation. SIMD variants (AVX2+FMA
// on x86-64, NEON on AArch64) are compiled when the toolchain supports them
// and picked at runtime from what the CPU reports. Setting the environment
// variable DSTS_SIMD to "scalar", "avx2", "neon" or "auto" overrides the
// choice made on first use.

#include <cstddef>
#include <span>
#include <string_view>

namespace dsts::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

struct Kernels {
  Isa isa;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// sum_i x[i]
  double (*sum)(const double* x, std::size_t n);
  /// sum_i (x[i] - center)^2
  double (*sum_sq_dev)(const double* x, double center, std::size_t n);
  /// y[i] = scale * x[i] + shift
  void (*affine)(const double* x, double scale, double shift, double* y, std::size_t n);
};

const Kernels& scalar_kernels() noexcept;
/// Null when the variant was not compiled into this build.
const Kernels* avx2_kernels() noexcept;
const Kernels* neon_kernels() noexcept;

/// True when the variant is compiled in and the running CPU supports it.
bool isa_supported(Isa isa) noexcept;
Isa best_supported_isa() noexcept;

/// Kernel table used by the library. Resolved once, on first call.
const Kernels& active() noexcept;

/// Forces a particular variant; throws ConfigError when it is unsupported.
void select_isa(Isa isa);

/// Parses "scalar" | "avx2" | "neon" | "auto".
Isa parse_isa(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

/// RAII guard that swaps the active kernel table for the lifetime of the object.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa);
  ~ScopedIsa();
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

}  // namespace dsts::simd
