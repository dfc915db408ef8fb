#include "dsts/metrics.hpp"

#include <fmt/format.h>

#include "dsts/error.hpp"
#include "dsts/io.hpp"

namespace dsts {

namespace {
double rate(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

Confusion confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw ShapeError(fmt::format("confusion: {} true labels vs {} predictions", y_true.size(), y_pred.size()));
  }
  Confusion c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1)) {
      throw ConfigError(fmt::format("confusion: labels must be 0 or 1, got ({}, {}) at {}", t, p, i));
    }
    if (t == 1) {
      ++(p == 1 ? c.tp : c.fn);
    } else {
      ++(p == 1 ? c.fp : c.tn);
    }
  }
  return c;
}

MetricsReport scores(const Confusion& c) {
  if (c.total() == 0) throw DegenerateInputError("scores: no evaluated samples");
  MetricsReport r;
  r.counts = c;
  r.acc = rate(c.tp + c.tn, c.total());
  r.precision = rate(c.tp, c.tp + c.fp);
  r.recall = rate(c.tp, c.tp + c.fn);
  const double pr = r.precision + r.recall;
  r.f1 = pr == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / pr;
  r.per_class_recall = {rate(c.tn, c.tn + c.fp), r.recall};
  return r;
}

std::string to_json(const MetricsReport& r, const std::vector<std::pair<std::string, std::string>>& extra) {
  using io::format_double;
  std::string out = fmt::format(
      "{{\n  \"acc\": {},\n  \"f1\": {},\n  \"precision\": {},\n  \"recall\": {},\n  \"tp\": {},\n  \"fp\": {},\n"
      "  \"fn\": {},\n  \"tn\": {},\n  \"per_class_recall\": [{}, {}]",
      format_double(r.acc), format_double(r.f1), format_double(r.precision), format_double(r.recall), r.counts.tp,
      r.counts.fp, r.counts.fn, r.counts.tn, format_double(r.per_class_recall[0]),
      format_double(r.per_class_recall[1]));
  for (const auto& [key, value] : extra) out += fmt::format(",\n  \"{}\": {}", key, value);
  out += "\n}\n";
  return out;
}

}  // namespace dsts
