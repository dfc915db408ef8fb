#include <atomic>
#include <cstdlib>
#include <string>

#include "dsts/error.hpp"
#include "dsts/simd/kernels.hpp"

namespace dsts::simd {

#ifndef DSTS_HAVE_AVX2_KERNELS
const Kernels* avx2_kernels() noexcept { return nullptr; }
#endif
#ifndef DSTS_HAVE_NEON_KERNELS
const Kernels* neon_kernels() noexcept { return nullptr; }
#endif

namespace {

const Kernels* table_for(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return &scalar_kernels();
    case Isa::Avx2:
      return avx2_kernels();
    case Isa::Neon:
      return neon_kernels();
  }
  return nullptr;
}

bool cpu_has_avx2_fma() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Kernels* resolve_initial() noexcept {
  Isa isa = best_supported_isa();
  if (const char* env = std::getenv("DSTS_SIMD"); env != nullptr && *env != '\0') {
    const std::string_view name(env);
    if (name == "scalar") isa = Isa::Scalar;
    if (name == "avx2" && isa_supported(Isa::Avx2)) isa = Isa::Avx2;
    if (name == "neon" && isa_supported(Isa::Neon)) isa = Isa::Neon;
  }
  return table_for(isa);
}

std::atomic<const Kernels*> g_active{nullptr};

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  if (name == "neon") return Isa::Neon;
  if (name == "auto") return best_supported_isa();
  throw ConfigError("unknown SIMD variant '" + std::string(name) + "'");
}

bool isa_supported(Isa isa) noexcept {
  if (table_for(isa) == nullptr) return false;
  if (isa == Isa::Avx2) return cpu_has_avx2_fma();
  return true;
}

Isa best_supported_isa() noexcept {
  if (isa_supported(Isa::Avx2)) return Isa::Avx2;
  if (isa_supported(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

const Kernels& active() noexcept {
  const Kernels* k = g_active.load(std::memory_order_acquire);
  if (k == nullptr) {
    const Kernels* resolved = resolve_initial();
    g_active.compare_exchange_strong(k, resolved, std::memory_order_acq_rel);
    k = g_active.load(std::memory_order_acquire);
  }
  return *k;
}

void select_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw ConfigError("SIMD variant '" + std::string(isa_name(isa)) +
                      "' is not available on this build/CPU");
  }
  g_active.store(table_for(isa), std::memory_order_release);
}

ScopedIsa::ScopedIsa(Isa isa) : previous_(active().isa) { select_isa(isa); }

ScopedIsa::~ScopedIsa() { g_active.store(table_for(previous_), std::memory_order_release); }

}  // namespace dsts::simd
