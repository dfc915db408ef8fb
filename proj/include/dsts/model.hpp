#pragma once

// Two-layer convolutional embedding network with a linear classifier head,
// trained on a convex mix of the multi-similarity and weighted
// cross-entropy objectives.
//
//   x[B,d,T] -> conv1 -> bn1 -> relu -> conv2 -> bn2 -> relu
//            -> max over time -> e[B,c2] -> linear -> logits -> softmax

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsts/data.hpp"
#include "dsts/layers.hpp"
#include "dsts/losses.hpp"
#include "dsts/optim.hpp"
#include "dsts/rng.hpp"

namespace dsts {

struct ModelConfig {
  std::size_t d = 4;
  std::array<std::size_t, 2> channels{32, 64};
  std::array<std::size_t, 2> kernels{5, 3};
  std::size_t num_classes = 2;
  double lambda_mix = 0.25;
  MsHyper ms;
  AdamHyper adam;
  std::size_t batch_p = 2;
  std::size_t batch_k = 8;
  std::size_t epochs = 100;
  std::size_t seq_len = 128;
  double bn_momentum = 0.1;
  double bn_eps = 1e-5;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Ablation variants: I trains without the similarity term (lambda_mix = 0),
/// II trains with unit class weights.
enum class Variant { Full, I, II };

std::string_view variant_name(Variant v) noexcept;
Variant parse_variant(std::string_view name);

struct ModelParams {
  ConvParams conv1;
  BatchNormParams bn1;
  ConvParams conv2;
  BatchNormParams bn2;
  LinearParams fc;

  /// Trainable tensors only (running statistics excluded).
  ParamMap learnable() const;
  void set_learnable(const ParamMap& params);
  /// Running statistics keyed "bn1.running_mean", ...
  ParamMap running_stats() const;
  void set_running_stats(const ParamMap& stats);
  std::size_t embedding_dim() const { return conv2.out_channels(); }
};

/// Uniform(+-sqrt(6 / fan_in)) weights, zero biases, identity batch norm.
ModelParams build_model(const ModelConfig& cfg, Rng& rng);

/// Every intermediate of a forward pass, kept for the backward pass.
struct ForwardTrace {
  Mode mode = Mode::Eval;
  Tensor x;
  Tensor conv1_out;
  BatchNormOutput bn1;
  Tensor act1;
  Tensor conv2_out;
  BatchNormOutput bn2;
  Tensor act2;
  MaxPoolOutput pool;
  Tensor logits;
  Tensor probs;

  const Tensor& embeddings() const { return pool.e; }
};

ForwardTrace forward_trace(const ModelParams& p, const Tensor& x, Mode mode);

struct ForwardResult {
  Tensor e;
  Tensor logits;
  Tensor probs;
  /// Running statistics after a Train-mode pass; empty in Eval mode.
  std::optional<ParamMap> running_stats;
};

ForwardResult forward(const ModelParams& p, const Tensor& x, Mode mode);

/// Gradients of all learnable tensors given the upstream gradients of the
/// embeddings (from the similarity branch) and of the logits.
ParamMap backward(const ModelParams& p, const ForwardTrace& trace, const Tensor& d_embed, const Tensor& d_logits);

struct ObjectiveTerms {
  double l_car = 0.0;
  double l_ia = 0.0;
  double l_total = 0.0;
};

struct ObjectiveResult {
  ObjectiveTerms terms;
  ParamMap grads;
  ForwardTrace trace;
};

struct ObjectiveSpec {
  double lambda_mix = 0.25;
  MsHyper ms;
  ClassWeights weights;
  /// Skip the similarity branch entirely (its term and gradient are zero).
  bool skip_car = false;
};

/// Train-mode forward, both losses, and the gradient of
/// lambda * L_car + (1 - lambda) * L_ia with respect to every learnable tensor.
ObjectiveResult objective(const ModelParams& p, const Tensor& x, std::span<const int> labels,
                          const ObjectiveSpec& spec);
/// Same objective value without computing gradients.
ObjectiveTerms objective_value(const ModelParams& p, const Tensor& x, std::span<const int> labels,
                               const ObjectiveSpec& spec);

/// Arg-max class per row of the Eval-mode probabilities; ties go to the lower index.
Labels predict(const ModelParams& p, const Tensor& x);
Labels argmax_rows(const Tensor& scores);

/// Packs samples (all of equal length) into a [B, d, T] input tensor.
Tensor pack_batch(const Dataset& ds, std::span<const std::size_t> indices);

struct EpochStats {
  double l_car = 0.0;
  double l_ia = 0.0;
  double l_total = 0.0;
  double train_acc = 0.0;
};

/// A trained network plus everything needed to preprocess new data.
struct TrainedModel {
  ModelConfig config;
  Variant variant = Variant::Full;
  Standardizer standardizer;
  ClassWeights weights;
  ModelParams params;
};

struct TrainResult {
  TrainedModel model;
  std::vector<EpochStats> history;
};

/// Resamples to cfg.seq_len, standardizes with training statistics, then runs
/// cfg.epochs epochs of balanced P x K batches with Adam. Deterministic given
/// (cfg, dataset, variant).
TrainResult train(const ModelConfig& cfg, const Dataset& dataset, Variant variant);

/// Applies the model's resampling and standardization, then predicts.
Labels predict_dataset(const TrainedModel& model, const Dataset& raw);

}  // namespace dsts
