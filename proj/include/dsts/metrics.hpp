#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dsts {

/// Binary confusion counts with ASD (label 1) as the positive class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct MetricsReport {
  double acc = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::array<double, 2> per_class_recall{};  // [TD, ASD]
  Confusion counts;
};

Confusion confusion(std::span<const int> y_true, std::span<const int> y_pred);

/// Accuracy, precision, recall and F1 of the positive class; 0/0 rates are 0.
MetricsReport scores(const Confusion& c);

/// UTF-8 JSON with keys acc, f1, precision, recall, tp, fp, fn, tn,
/// per_class_recall in that order, floats at 17 significant digits, followed
/// by any `extra` members (values must already be valid JSON text).
std::string to_json(const MetricsReport& r, const std::vector<std::pair<std::string, std::string>>& extra = {});

}  // namespace dsts
