#include "dsts/synthgaze.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <thread>
#include <vector>

#include "dsts/error.hpp"
#include "dsts/rng.hpp"

namespace dsts {

namespace {

// Stream id for the label permutation; sample streams use ids 0..n-1.
constexpr std::uint64_t kLabelStream = 0xA5D0'0000'0000'0001ULL;

bool disc_in_unit_square(const Disc& d) {
  return d.radius > 0.0 && d.cx - d.radius >= 0.0 && d.cx + d.radius <= 1.0 && d.cy - d.radius >= 0.0 &&
         d.cy + d.radius <= 1.0;
}

struct Point {
  double x, y;
};

Point uniform_in_disc(const Disc& d, Rng& rng) {
  const double r = d.radius * std::sqrt(rng.uniform());
  const double theta = 2.0 * std::numbers::pi * rng.uniform();
  return {d.cx + r * std::cos(theta), d.cy + r * std::sin(theta)};
}

class SequenceWriter {
 public:
  SequenceWriter(std::size_t len) : seq_(Shape{len, kGazeFeatures}, 0.0), len_(len) {}

  bool full() const noexcept { return n_ == len_; }

  void emit(double x, double y, bool fixation) {
    if (full()) return;
    x = std::clamp(x, 0.0, 1.0);
    y = std::clamp(y, 0.0, 1.0);
    const double speed = n_ == 0 ? 0.0 : std::hypot(x - px_, y - py_);
    double* row = seq_.data().data() + n_ * kGazeFeatures;
    row[0] = x;
    row[1] = y;
    row[2] = speed;
    row[3] = fixation ? 1.0 : 0.0;
    px_ = x;
    py_ = y;
    ++n_;
  }

  Tensor take() { return std::move(seq_); }

 private:
  Tensor seq_;
  std::size_t len_;
  std::size_t n_ = 0;
  double px_ = 0.0;
  double py_ = 0.0;
};

Tensor generate_sequence(const GenConfig& cfg, int label, Rng& rng) {
  SequenceWriter out(cfg.seq_len);
  const double p_social = social_probability(cfg, label);
  const double mean_dur = duration_mean(cfg, label);
  // Lognormal location chosen so the distribution mean equals mean_dur.
  const double mu = std::log(mean_dur) - 0.5 * cfg.duration_sigma * cfg.duration_sigma;
  bool have_prev = false;
  Point prev{0.0, 0.0};
  while (!out.full()) {
    const Disc& roi = rng.bernoulli(p_social) ? cfg.social_roi : cfg.nonsocial_roi;
    const Point target = uniform_in_disc(roi, rng);
    if (have_prev) {
      for (std::size_t k = 1; k <= cfg.saccade_steps; ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(cfg.saccade_steps + 1);
        out.emit(prev.x + f * (target.x - prev.x), prev.y + f * (target.y - prev.y), false);
      }
    }
    const double raw = std::exp(mu + cfg.duration_sigma * rng.normal());
    const auto duration = std::max<long>(1, std::lround(raw));
    for (long k = 0; k < duration; ++k) {
      out.emit(target.x + rng.normal(0.0, cfg.jitter), target.y + rng.normal(0.0, cfg.jitter), true);
    }
    prev = target;
    have_prev = true;
  }
  return out.take();
}

}  // namespace

bool Disc::contains(double x, double y) const noexcept {
  const double dx = x - cx;
  const double dy = y - cy;
  return dx * dx + dy * dy <= radius * radius;
}

void GenConfig::validate() const {
  if (n_samples == 0) throw ConfigError("n_samples must be positive");
  if (!(imbalance >= 0.0 && imbalance <= 1.0)) throw ConfigError(fmt::format("imbalance must lie in [0, 1], got {}", imbalance));
  if (!(separation >= 0.0 && separation <= 1.0)) {
    throw ConfigError(fmt::format("separation must lie in [0, 1], got {}", separation));
  }
  if (seq_len == 0) throw ConfigError("seq_len must be positive");
  if (!disc_in_unit_square(social_roi) || !disc_in_unit_square(nonsocial_roi)) {
    throw ConfigError("regions of interest must lie inside the unit square");
  }
  if (!(td_duration_mean >= 1.0) || !(asd_duration_mean >= 1.0)) {
    throw ConfigError("fixation duration means must be at least one step");
  }
  if (!(duration_sigma >= 0.0)) throw ConfigError("duration_sigma must be non-negative");
  if (!(jitter >= 0.0)) throw ConfigError("jitter must be non-negative");
}

double social_probability(const GenConfig& cfg, int label) noexcept {
  return label == kLabelASD ? 0.5 - 0.3 * cfg.separation : 0.5 + 0.3 * cfg.separation;
}

double duration_mean(const GenConfig& cfg, int label) noexcept {
  const double mid = 0.5 * (cfg.td_duration_mean + cfg.asd_duration_mean);
  const double end = label == kLabelASD ? cfg.asd_duration_mean : cfg.td_duration_mean;
  return mid + cfg.separation * (end - mid);
}

Dataset generate(const GenConfig& cfg, unsigned threads) {
  cfg.validate();
  const std::size_t n = cfg.n_samples;
  const auto n_asd = static_cast<std::size_t>(std::lround(static_cast<double>(n) * cfg.imbalance));
  std::vector<int> labels(n, kLabelTD);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(std::min(n_asd, n)), kLabelASD);
  const Rng root(cfg.seed);
  Rng label_rng = root.derive(kLabelStream);
  label_rng.shuffle(std::span<int>(labels));

  Dataset ds;
  ds.d = kGazeFeatures;
  ds.samples.resize(n);
  const int width = static_cast<int>(fmt::format("{}", n - 1).size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = root.derive(i);
      ds.samples[i] = Sample{fmt::format("s{:0{}}", i, width), generate_sequence(cfg, labels[i], rng), labels[i]};
    }
  };
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    work(0, n);
    return ds;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin < end) pool.emplace_back(work, begin, end);
  }
  pool.clear();
  return ds;
}

double social_dwell_fraction(const Sample& s, const GenConfig& cfg) {
  std::size_t inside = 0;
  for (std::size_t t = 0; t < s.length(); ++t) {
    if (cfg.social_roi.contains(s.seq[t * kGazeFeatures], s.seq[t * kGazeFeatures + 1])) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(s.length());
}

}  // namespace dsts
