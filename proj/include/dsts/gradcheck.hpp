#pragma once

// Finite-difference verification of every hand-written backward pass.
//
// Each check draws random inputs and parameters from a seed, contracts the
// layer output with a random upstream tensor R to get a scalar
// f = sum(R .* layer(input)), and compares the analytic vector-Jacobian
// product against central differences of f.

#include <cstdint>
#include <string>
#include <vector>

namespace dsts {

inline constexpr double kGradCheckStep = 1e-5;
inline constexpr double kLayerGradTolerance = 1e-5;
inline constexpr double kModelGradTolerance = 1e-4;

struct GradCheckResult {
  std::string name;
  std::uint64_t seed = 0;
  double max_rel_error = 0.0;
  double tolerance = 0.0;

  bool passed() const noexcept { return max_rel_error < tolerance; }
};

/// Layer and loss checks: conv1d, batchnorm1d (Train and Eval), relu,
/// global max-pool, linear, softmax, softmax through weighted CE, cosine
/// similarity, multi-similarity loss.
std::vector<GradCheckResult> layer_gradchecks(std::uint64_t seed);

/// Gradient of the mixed objective with respect to every model parameter
/// (B=8, T=16, channels [4,6]); batch statistics are recomputed in each
/// perturbed forward pass.
std::vector<GradCheckResult> model_gradchecks(std::uint64_t seed);

std::string format_gradcheck_line(const GradCheckResult& r);

}  // namespace dsts
