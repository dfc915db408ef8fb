#pragma once

// Synthetic labeled fixation/saccade sequences.
//
// Each sequence alternates fixations (a target held for a lognormal number of
// steps with small positional jitter) and short linear saccades between
// targets. Targets fall in a "social" disc with a label-dependent
// probability, and fixation durations differ between labels; the separation
// parameter s in [0, 1] scales both contrasts, with s = 0 making the two
// classes identically distributed.
//
// Per-step features: x, y (clipped to [0,1]), speed (Euclidean displacement
// from the previous step), fixation flag (1 during fixations, 0 in saccades).

#include <cstdint>

#include "dsts/data.hpp"

namespace dsts {

struct Disc {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;

  bool contains(double x, double y) const noexcept;
};

struct GenConfig {
  std::size_t n_samples = 1000;
  double imbalance = 0.7;   // fraction labeled ASD
  double separation = 0.8;  // s
  std::size_t seq_len = 128;
  Disc social_roi{0.3, 0.3, 0.12};
  Disc nonsocial_roi{0.7, 0.7, 0.2};
  double td_duration_mean = 12.0;   // at s = 1
  double asd_duration_mean = 18.0;  // at s = 1
  double duration_sigma = 0.3;      // lognormal shape
  std::size_t saccade_steps = 2;
  double jitter = 0.005;
  std::uint64_t seed = 0;

  void validate() const;
};

inline constexpr std::size_t kGazeFeatures = 4;

/// Probability that a fixation targets the social disc: 0.5 +- 0.3 s (TD +, ASD -).
double social_probability(const GenConfig& cfg, int label) noexcept;
/// Mean fixation duration, blended from the per-class means toward their midpoint as s -> 0.
double duration_mean(const GenConfig& cfg, int label) noexcept;

/// Generates round(n * imbalance) ASD and the rest TD samples, in a seeded
/// shuffled order. Output is independent of `threads`.
Dataset generate(const GenConfig& cfg, unsigned threads = 1);

/// Fraction of steps whose (x, y) lies inside the social disc.
double social_dwell_fraction(const Sample& s, const GenConfig& cfg);

}  // namespace dsts
