#include "dsts/finite_diff.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "dsts/error.hpp"

namespace dsts {

Tensor finite_diff_grad(const ScalarFn& f, const Tensor& x, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ConfigError(fmt::format("finite difference step must be positive, got {}", h));
  }
  Tensor grad(x.shape(), 0.0);
  Tensor probe = x;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double orig = probe[j];
    probe[j] = orig + h;
    const double fp = f(probe);
    probe[j] = orig - h;
    const double fm = f(probe);
    probe[j] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericError(fmt::format("non-finite function value while differencing coordinate {}", j));
    }
    grad[j] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

double max_abs(const Tensor& t) noexcept {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_relative_error(const Tensor& analytic, const Tensor& numeric, double scale, double guard) {
  if (analytic.shape() != numeric.shape()) {
    throw ShapeError(fmt::format("gradient shape mismatch {} vs {}", shape_to_string(analytic.shape()),
                                 shape_to_string(numeric.shape())));
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < analytic.size(); ++j) worst = std::max(worst, std::abs(analytic[j] - numeric[j]));
  return worst / (scale + guard);
}

double max_relative_error(const Tensor& analytic, const Tensor& numeric, double guard) {
  return max_relative_error(analytic, numeric, std::max(max_abs(analytic), max_abs(numeric)), guard);
}

}  // namespace dsts
