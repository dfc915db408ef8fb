#pragma once

#include <functional>

#include "dsts/tensor.hpp"

namespace dsts {

using ScalarFn = std::function<double(const Tensor&)>;

/// Central-difference gradient of a scalar function:
/// g[j] = (f(x + h e_j) - f(x - h e_j)) / (2h).
///
/// Throws ConfigError for h <= 0 and NumericError if f returns a non-finite value.
Tensor finite_diff_grad(const ScalarFn& f, const Tensor& x, double h);

/// max_j |a_j - n_j| / (scale + guard), where scale defaults to the largest
/// magnitude found in either tensor. Shapes must match.
double max_relative_error(const Tensor& analytic, const Tensor& numeric, double guard = 1e-8);
double max_relative_error(const Tensor& analytic, const Tensor& numeric, double scale, double guard);

/// Largest absolute entry; 0 for an empty tensor.
double max_abs(const Tensor& t) noexcept;

}  // namespace dsts
