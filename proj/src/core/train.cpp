#include <fmt/format.h>
#include <numeric>

#include "dsts/error.hpp"
#include "dsts/model.hpp"

namespace dsts {

namespace {

constexpr std::size_t kEvalChunk = 128;

Labels predict_prepared(const ModelParams& params, const Dataset& ds) {
  Labels out;
  out.reserve(ds.size());
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < ds.size(); start += kEvalChunk) {
    idx.resize(std::min(kEvalChunk, ds.size() - start));
    std::iota(idx.begin(), idx.end(), start);
    const Labels part = predict(params, pack_batch(ds, idx));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Dataset prepare(const Dataset& raw, std::size_t seq_len, const Standardizer& st) {
  return st.apply(resample_dataset(raw, seq_len));
}

}  // namespace

TrainResult train(const ModelConfig& cfg, const Dataset& dataset, Variant variant) {
  cfg.validate();
  if (dataset.d != cfg.d) {
    throw ConfigError(fmt::format("dataset has {} features but the model expects {}", dataset.d, cfg.d));
  }
  const Labels raw_labels = dataset.labels();
  for (int y : raw_labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= cfg.num_classes) {
      throw ConfigError(fmt::format("label {} outside [0, {})", y, cfg.num_classes));
    }
  }
  const auto counts = dataset.class_counts(cfg.num_classes);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw DegenerateInputError(fmt::format("training set has no samples of class {}; both classes are required", c));
    }
  }

  TrainResult result;
  TrainedModel& model = result.model;
  model.config = cfg;
  model.variant = variant;
  const Dataset resampled = resample_dataset(dataset, cfg.seq_len);
  model.standardizer = Standardizer::fit(resampled);
  const Dataset prepared = model.standardizer.apply(resampled);
  const Labels labels = prepared.labels();

  ObjectiveSpec spec;
  spec.ms = cfg.ms;
  spec.lambda_mix = variant == Variant::I ? 0.0 : cfg.lambda_mix;
  spec.skip_car = variant == Variant::I;
  spec.weights = variant == Variant::II ? ClassWeights::ones(cfg.num_classes) : class_weights(labels, cfg.num_classes);
  model.weights = spec.weights;

  const Rng root(cfg.seed);
  Rng init_rng = root.derive(0);
  model.params = build_model(cfg, init_rng);
  AdamState adam = AdamState::zeros_like(model.params.learnable());

  result.history.reserve(cfg.epochs);
  Labels batch_labels;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::uint64_t batch_seed = root.derive(epoch + 1).next_u64();
    const auto batches = balanced_batches(prepared, cfg.batch_p, cfg.batch_k, batch_seed);
    EpochStats stats;
    for (const Batch& batch : batches) {
      batch_labels.clear();
      for (std::size_t i : batch) batch_labels.push_back(labels[i]);
      const Tensor x = pack_batch(prepared, batch);
      ObjectiveResult obj = objective(model.params, x, batch_labels, spec);
      model.params.bn1.running_mean = obj.trace.bn1.running_mean;
      model.params.bn1.running_var = obj.trace.bn1.running_var;
      model.params.bn2.running_mean = obj.trace.bn2.running_mean;
      model.params.bn2.running_var = obj.trace.bn2.running_var;
      AdamResult step = adam_step(model.params.learnable(), obj.grads, adam, cfg.adam);
      model.params.set_learnable(step.params);
      adam = std::move(step.state);
      stats.l_car += obj.terms.l_car;
      stats.l_ia += obj.terms.l_ia;
      stats.l_total += obj.terms.l_total;
    }
    const double nb = static_cast<double>(batches.size());
    stats.l_car /= nb;
    stats.l_ia /= nb;
    stats.l_total /= nb;
    const Labels pred = predict_prepared(model.params, prepared);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == labels[i] ? 1 : 0;
    stats.train_acc = static_cast<double>(correct) / static_cast<double>(pred.size());
    result.history.push_back(stats);
  }
  return result;
}

Labels predict_dataset(const TrainedModel& model, const Dataset& raw) {
  if (raw.d != model.config.d) {
    throw ConfigError(fmt::format("dataset has {} features but the model expects {}", raw.d, model.config.d));
  }
  return predict_prepared(model.params, prepare(raw, model.config.seq_len, model.standardizer));
}

}  // namespace dsts
