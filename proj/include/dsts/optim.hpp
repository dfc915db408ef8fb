#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "dsts/tensor.hpp"

namespace dsts {

/// Learnable tensors keyed by a stable dotted name ("conv1.weight", ...).
using ParamMap = std::map<std::string, Tensor>;

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;
};

struct AdamState {
  ParamMap m;
  ParamMap v;
  std::uint64_t t = 0;

  static AdamState zeros_like(const ParamMap& params);
};

struct AdamResult {
  ParamMap params;
  AdamState state;
};

/// One bias-corrected Adam update. Pure: inputs are left untouched.
AdamResult adam_step(const ParamMap& params, const ParamMap& grads, const AdamState& state, const AdamHyper& h);

}  // namespace dsts
