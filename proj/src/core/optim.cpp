#include "dsts/optim.hpp"

#include <cmath>
#include <fmt/format.h>

#include "dsts/error.hpp"

namespace dsts {

void AdamHyper::validate() const {
  if (!(lr >= 0.0)) throw ConfigError(fmt::format("adam lr must be non-negative, got {}", lr));
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError(fmt::format("adam betas must lie in [0, 1), got {} and {}", beta1, beta2));
  }
  if (!(eps > 0.0)) throw ConfigError(fmt::format("adam eps must be positive, got {}", eps));
}

AdamState AdamState::zeros_like(const ParamMap& params) {
  AdamState s;
  for (const auto& [name, p] : params) {
    s.m.emplace(name, Tensor(p.shape(), 0.0));
    s.v.emplace(name, Tensor(p.shape(), 0.0));
  }
  return s;
}

AdamResult adam_step(const ParamMap& params, const ParamMap& grads, const AdamState& state, const AdamHyper& h) {
  h.validate();
  if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ShapeError(fmt::format("adam_step: {} params, {} grads, {}/{} moments", params.size(), grads.size(),
                                 state.m.size(), state.v.size()));
  }
  AdamResult out{params, state};
  out.state.t = state.t + 1;
  const double t = static_cast<double>(out.state.t);
  const double bc1 = 1.0 - std::pow(h.beta1, t);
  const double bc2 = 1.0 - std::pow(h.beta2, t);

  for (auto& [name, theta] : out.params) {
    const auto g_it = grads.find(name);
    const auto m_it = out.state.m.find(name);
    const auto v_it = out.state.v.find(name);
    if (g_it == grads.end() || m_it == out.state.m.end() || v_it == out.state.v.end()) {
      throw ShapeError("adam_step: no gradient or moment for parameter '" + name + "'");
    }
    const Tensor& g = g_it->second;
    Tensor& m = m_it->second;
    Tensor& v = v_it->second;
    if (g.shape() != theta.shape() || m.shape() != theta.shape() || v.shape() != theta.shape()) {
      throw ShapeError(fmt::format("adam_step: shape mismatch for '{}': param {}, grad {}", name,
                                   shape_to_string(theta.shape()), shape_to_string(g.shape())));
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
      v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      theta[i] -= h.lr * m_hat / (std::sqrt(v_hat) + h.eps);
    }
  }
  return out;
}

}  // namespace dsts
