#pragma once

// Gaze sequence datasets: CSV ingestion, length normalization, class
// weights, stratified splitting and P x K balanced batch sampling.
//
// On-disk layout of a dataset directory:
//   data.csv    header `sample_id,t,f0,...,f{d-1}`; rows grouped by sample,
//               t running 0..T-1 within each group.
//   labels.csv  header `sample_id,label`; label 1 = ASD, 0 = TD.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dsts/losses.hpp"
#include "dsts/tensor.hpp"

namespace dsts {

inline constexpr int kLabelTD = 0;
inline constexpr int kLabelASD = 1;

struct Sample {
  std::string id;
  Tensor seq;  // [T, d]
  int label = 0;

  std::size_t length() const { return seq.dim(0); }
};

struct Dataset {
  std::vector<Sample> samples;
  std::size_t d = 0;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  Labels labels() const;
  /// Per-label totals for labels 0..classes-1.
  std::vector<std::size_t> class_counts(std::size_t classes = 2) const;
  /// Subset in the order given by `indices`.
  Dataset subset(std::span<const std::size_t> indices) const;
};

Dataset load_dataset(const std::filesystem::path& dir);
/// Writes data.csv and labels.csv with 17 significant digits per value.
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);

/// Per-feature linear interpolation of [T,d] onto T_target evenly spaced positions.
Tensor resample_to_length(const Tensor& seq, std::size_t target_len);
Dataset resample_dataset(const Dataset& ds, std::size_t target_len);

/// w_c = n_total / (classes * n_c). Throws DegenerateInputError if a class is absent.
ClassWeights class_weights(std::span<const int> labels, std::size_t classes = 2);

struct Split {
  Dataset train;
  Dataset test;
};

/// Per-class shuffled partition; class c contributes round(n_c * test_frac) test samples.
/// Both halves keep the original sample order.
Split stratified_split(const Dataset& ds, double test_frac, std::uint64_t seed);

using Batch = std::vector<std::size_t>;

/// ceil(n_largest / K) batches of P classes x K samples each, grouped by class.
/// Every class cycles through reshuffled permutations of its members, so the
/// largest class is covered once without replacement and smaller classes repeat.
std::vector<Batch> balanced_batches(const Dataset& ds, std::size_t P, std::size_t K, std::uint64_t seed);

/// Per-feature z-score parameters fitted on a training set.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  /// Mean and biased standard deviation over every time step of every sample.
  /// Features with zero spread get stddev 1.
  static Standardizer fit(const Dataset& ds);
  Dataset apply(const Dataset& ds) const;
};

}  // namespace dsts
