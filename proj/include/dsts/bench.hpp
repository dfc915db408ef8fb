#pragma once

// Synthetic-data benchmark: generate -> stratified split -> train each
// ablation variant -> score on the held-out split, over a grid of
// separations and seeds, with per-cell accuracy ranks of the variants.

#include <cstdint>
#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

#include "dsts/metrics.hpp"
#include "dsts/model.hpp"
#include "dsts/synthgaze.hpp"

namespace dsts {

struct ExperimentResult {
  double separation = 0.0;
  std::uint64_t seed = 0;
  Variant variant = Variant::Full;
  MetricsReport metrics;
  double final_train_acc = 0.0;
};

/// One generate/split/train/evaluate run; `seed` drives all four stages.
ExperimentResult run_experiment(const GenConfig& gen, const ModelConfig& model, double test_frac, std::uint64_t seed,
                                Variant variant);

struct BenchConfig {
  GenConfig gen;
  ModelConfig model;
  double test_frac = 0.2;
  std::vector<double> separations{0.5, 0.65, 0.8};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<Variant> variants{Variant::Full, Variant::I, Variant::II};

  /// Desk-scale settings used by the `bench` command and the acceptance suite.
  static BenchConfig desk_scale();
};

struct VariantSummary {
  Variant variant = Variant::Full;
  double mean_acc = 0.0;
  double mean_f1 = 0.0;
  double mean_td_recall = 0.0;
  double mean_rank = 0.0;  // 1 = best accuracy within a (separation, seed) cell
};

struct BenchReport {
  std::vector<ExperimentResult> runs;
  std::vector<VariantSummary> summary;
  /// Summaries restricted to one separation value, in BenchConfig order.
  std::vector<std::pair<double, std::vector<VariantSummary>>> by_separation;
};

using BenchProgress = std::function<void(const ExperimentResult&)>;

BenchReport run_bench(const BenchConfig& cfg, const BenchProgress& progress = {});

/// Accuracy ranks with ties sharing the average rank.
std::vector<double> accuracy_ranks(const std::vector<double>& accs);

nlohmann::json to_json(const BenchReport& report);

}  // namespace dsts
