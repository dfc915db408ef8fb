#include "dsts/rng.hpp"

#include <cmath>
#include <numbers>

namespace dsts {

namespace {
__extension__ using u128 = unsigned __int128;
}  // namespace

std::size_t Rng::index(std::size_t n) noexcept {
  // Lemire's multiply-shift with rejection keeps the result unbiased.
  const std::uint64_t bound = n;
  u128 m = static_cast<u128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

double Rng::normal() noexcept {
  // 1 - u lies in (0, 1], so the logarithm is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace dsts
