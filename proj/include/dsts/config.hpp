#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>

#include "dsts/model.hpp"
#include "dsts/synthgaze.hpp"

namespace dsts {

/// Everything a command needs besides file paths: model and generator
/// settings, the split fraction, the ablation variant and one seed that
/// drives generation, splitting, initialization and batching.
///
/// JSON layout (every key optional, unknown keys rejected):
///   { "seed": 0, "test_frac": 0.2, "variant": "full",
///     "model": { "d", "channels", "kernels", "num_classes", "lambda_mix",
///                "alpha", "beta", "lambda_margin", "lr", "beta1", "beta2",
///                "adam_eps", "batch_p", "batch_k", "epochs", "seq_len",
///                "bn_momentum", "bn_eps" },
///     "synth": { "n_samples", "imbalance", "separation", "seq_len",
///                "social_roi": {"cx","cy","radius"}, "nonsocial_roi": {...},
///                "td_duration_mean", "asd_duration_mean", "duration_sigma",
///                "saccade_steps", "jitter" } }
struct RunConfig {
  ModelConfig model;
  GenConfig synth;
  double test_frac = 0.2;
  Variant variant = Variant::Full;
  std::uint64_t seed = 0;
  /// True when the JSON named model.d; otherwise commands adopt the data's feature count.
  bool d_explicit = false;

  void set_seed(std::uint64_t s) {
    seed = s;
    model.seed = s;
    synth.seed = s;
  }
  void validate() const;
};

/// `base` overlaid with `j`. Throws ConfigError on unknown keys or bad types.
RunConfig parse_run_config(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace dsts
