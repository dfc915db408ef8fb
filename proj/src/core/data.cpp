#include "dsts/data.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "dsts/error.hpp"
#include "dsts/io.hpp"
#include "dsts/rng.hpp"

namespace dsts {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string expected_data_header(std::size_t d) {
  std::string h = "sample_id,t";
  for (std::size_t j = 0; j < d; ++j) h += fmt::format(",f{}", j);
  return h;
}

}  // namespace

Labels Dataset::labels() const {
  Labels out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.label);
  return out;
}

std::vector<std::size_t> Dataset::class_counts(std::size_t classes) const {
  std::vector<std::size_t> counts(classes, 0);
  for (const auto& s : samples) {
    if (s.label >= 0 && static_cast<std::size_t>(s.label) < classes) ++counts[static_cast<std::size_t>(s.label)];
  }
  return counts;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.d = d;
  out.samples.reserve(indices.size());
  for (std::size_t i : indices) out.samples.push_back(samples.at(i));
  return out;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  const auto data_path = dir / "data.csv";
  const auto labels_path = dir / "labels.csv";
  if (!std::filesystem::exists(data_path)) throw DataError("missing file: " + data_path.string());
  if (!std::filesystem::exists(labels_path)) throw DataError("missing file: " + labels_path.string());

  // labels.csv
  const std::string label_text = io::read_file(labels_path);
  const auto label_lines = split_lines(label_text);
  if (label_lines.empty() || label_lines[0] != "sample_id,label") {
    throw DataError("labels.csv: header must be exactly 'sample_id,label'");
  }
  std::vector<std::pair<std::string, int>> label_rows;
  std::unordered_map<std::string, std::size_t> label_index;
  for (std::size_t ln = 1; ln < label_lines.size(); ++ln) {
    const auto f = split_fields(label_lines[ln]);
    if (f.size() != 2) throw DataError(fmt::format("labels.csv line {}: expected 2 fields, got {}", ln + 1, f.size()));
    const std::string id(f[0]);
    const long long label = io::parse_int(f[1], fmt::format("labels.csv line {}", ln + 1));
    if (label != 0 && label != 1) {
      throw DataError(fmt::format("labels.csv line {}: label {} is not 0 (TD) or 1 (ASD)", ln + 1, label));
    }
    if (!label_index.emplace(id, label_rows.size()).second) {
      throw DataError(fmt::format("labels.csv line {}: duplicate sample_id '{}'", ln + 1, id));
    }
    label_rows.emplace_back(id, static_cast<int>(label));
  }

  // data.csv
  const std::string data_text = io::read_file(data_path);
  const auto data_lines = split_lines(data_text);
  if (data_lines.empty()) throw DataError("data.csv: missing header");
  const auto header = split_fields(data_lines[0]);
  if (header.size() < 3 || data_lines[0] != expected_data_header(header.size() - 2)) {
    throw DataError(fmt::format("data.csv: header must be 'sample_id,t,f0,...,f{{d-1}}', got '{}'", data_lines[0]));
  }
  const std::size_t d = header.size() - 2;

  std::unordered_map<std::string, std::vector<double>> values;
  std::unordered_map<std::string, std::size_t> lengths;
  std::unordered_set<std::string> closed;
  std::string current;
  for (std::size_t ln = 1; ln < data_lines.size(); ++ln) {
    const auto f = split_fields(data_lines[ln]);
    const std::string ctx = fmt::format("data.csv line {}", ln + 1);
    if (f.size() != d + 2) {
      throw DataError(fmt::format("{}: inconsistent feature count, expected {} fields, got {}", ctx, d + 2, f.size()));
    }
    std::string id(f[0]);
    if (id != current) {
      if (closed.count(id) != 0) throw DataError(fmt::format("{}: rows of sample '{}' are not contiguous", ctx, id));
      if (!current.empty()) closed.insert(current);
      current = id;
    }
    const long long t = io::parse_int(f[1], ctx);
    std::size_t& len = lengths[id];
    if (t != static_cast<long long>(len)) {
      throw DataError(fmt::format("{}: non-contiguous t for sample '{}' (expected {}, got {})", ctx, id, len, t));
    }
    ++len;
    auto& row = values[id];
    for (std::size_t j = 0; j < d; ++j) {
      const double v = io::parse_double(f[j + 2], ctx);
      if (!std::isfinite(v)) throw DataError(fmt::format("{}: non-finite feature value", ctx));
      row.push_back(v);
    }
  }

  for (const auto& [id, len] : lengths) {
    if (label_index.count(id) == 0) throw DataError(fmt::format("data.csv: sample '{}' has no entry in labels.csv", id));
  }

  Dataset ds;
  ds.d = d;
  ds.samples.reserve(label_rows.size());
  for (auto& [id, label] : label_rows) {
    auto it = values.find(id);
    if (it == values.end()) throw DataError(fmt::format("labels.csv: sample '{}' is absent from data.csv", id));
    const std::size_t len = lengths[id];
    ds.samples.push_back(Sample{id, Tensor(Shape{len, d}, std::move(it->second)), label});
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::string data = expected_data_header(ds.d) + "\n";
  std::string labels = "sample_id,label\n";
  for (const auto& s : ds.samples) {
    if (s.seq.rank() != 2 || s.seq.dim(1) != ds.d) {
      throw ShapeError(fmt::format("sample '{}' has shape {}, expected [T,{}]", s.id, shape_to_string(s.seq.shape()), ds.d));
    }
    for (std::size_t t = 0; t < s.length(); ++t) {
      data += s.id;
      data += ',';
      data += std::to_string(t);
      for (std::size_t j = 0; j < ds.d; ++j) {
        data += ',';
        data += io::format_double(s.seq[t * ds.d + j]);
      }
      data += '\n';
    }
    labels += fmt::format("{},{}\n", s.id, s.label);
  }
  std::filesystem::create_directories(dir);
  io::write_file_atomic(dir / "data.csv", data);
  io::write_file_atomic(dir / "labels.csv", labels);
}

Tensor resample_to_length(const Tensor& seq, std::size_t target_len) {
  if (seq.rank() != 2 || seq.dim(0) == 0) {
    throw DegenerateInputError("resample_to_length needs a [T,d] sequence with T >= 1, got " + shape_to_string(seq.shape()));
  }
  if (target_len == 0) throw ConfigError("resample target length must be positive");
  const std::size_t len = seq.dim(0);
  const std::size_t d = seq.dim(1);
  if (len == target_len) return seq;
  Tensor out(Shape{target_len, d}, 0.0);
  for (std::size_t i = 0; i < target_len; ++i) {
    const double pos = target_len == 1 ? 0.0
                                       : static_cast<double>(i) * static_cast<double>(len - 1) /
                                             static_cast<double>(target_len - 1);
    const auto lo = std::min(static_cast<std::size_t>(pos), len - 1);
    const std::size_t hi = std::min(lo + 1, len - 1);
    const double frac = pos - static_cast<double>(lo);
    for (std::size_t j = 0; j < d; ++j) {
      const double a = seq[lo * d + j];
      const double b = seq[hi * d + j];
      out[i * d + j] = frac == 0.0 ? a : a + frac * (b - a);
    }
  }
  return out;
}

Dataset resample_dataset(const Dataset& ds, std::size_t target_len) {
  Dataset out = ds;
  for (auto& s : out.samples) s.seq = resample_to_length(s.seq, target_len);
  return out;
}

ClassWeights class_weights(std::span<const int> labels, std::size_t classes) {
  if (classes == 0) throw ConfigError("class_weights needs at least one class");
  std::vector<std::size_t> counts(classes, 0);
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw ConfigError(fmt::format("class_weights: label {} outside [0, {})", y, classes));
    }
    ++counts[static_cast<std::size_t>(y)];
  }
  ClassWeights w{std::vector<double>(classes, 0.0)};
  const double n = static_cast<double>(labels.size());
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] == 0) throw DegenerateInputError(fmt::format("class_weights: class {} has no samples", c));
    w.w[c] = n / (static_cast<double>(classes) * static_cast<double>(counts[c]));
  }
  return w;
}

Split stratified_split(const Dataset& ds, double test_frac, std::uint64_t seed) {
  if (!(test_frac >= 0.0 && test_frac < 1.0)) {
    throw ConfigError(fmt::format("test fraction must lie in [0, 1), got {}", test_frac));
  }
  int max_label = -1;
  for (const auto& s : ds.samples) max_label = std::max(max_label, s.label);
  const Rng root(seed);
  std::vector<bool> in_test(ds.size(), false);
  for (int c = 0; c <= max_label; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.samples[i].label == c) members.push_back(i);
    }
    Rng rng = root.derive(static_cast<std::uint64_t>(c));
    rng.shuffle(std::span<std::size_t>(members));
    const auto n_test = static_cast<std::size_t>(std::lround(static_cast<double>(members.size()) * test_frac));
    for (std::size_t k = 0; k < n_test; ++k) in_test[members[k]] = true;
  }
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (std::size_t i = 0; i < ds.size(); ++i) (in_test[i] ? test_idx : train_idx).push_back(i);
  return {ds.subset(train_idx), ds.subset(test_idx)};
}

std::vector<Batch> balanced_batches(const Dataset& ds, std::size_t P, std::size_t K, std::uint64_t seed) {
  if (K < 2) throw ConfigError(fmt::format("balanced_batches needs K >= 2 for positive pairs, got {}", K));
  if (P == 0) throw ConfigError("balanced_batches needs P >= 1");

  std::vector<int> classes;
  for (const auto& s : ds.samples) classes.push_back(s.label);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (P > classes.size()) {
    throw ConfigError(fmt::format("balanced_batches: P={} exceeds the {} classes present", P, classes.size()));
  }

  struct Pool {
    std::vector<std::size_t> order;
    std::size_t pos = 0;
  };
  Rng rng(seed);
  std::vector<Pool> pools(classes.size());
  std::size_t largest = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.samples[i].label == classes[c]) pools[c].order.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(pools[c].order));
    largest = std::max(largest, pools[c].order.size());
  }
  auto draw = [&rng](Pool& pool) {
    if (pool.pos == pool.order.size()) {
      rng.shuffle(std::span<std::size_t>(pool.order));
      pool.pos = 0;
    }
    return pool.order[pool.pos++];
  };

  const std::size_t n_batches = (largest + K - 1) / K;
  std::vector<std::size_t> class_slots(classes.size());
  std::iota(class_slots.begin(), class_slots.end(), 0);
  std::vector<Batch> batches;
  batches.reserve(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    if (P < classes.size()) {
      rng.shuffle(std::span<std::size_t>(class_slots));
      std::sort(class_slots.begin(), class_slots.begin() + static_cast<std::ptrdiff_t>(P));
    }
    Batch batch;
    batch.reserve(P * K);
    for (std::size_t p = 0; p < P; ++p) {
      Pool& pool = pools[class_slots[p]];
      for (std::size_t k = 0; k < K; ++k) batch.push_back(draw(pool));
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

Standardizer Standardizer::fit(const Dataset& ds) {
  Standardizer st{std::vector<double>(ds.d, 0.0), std::vector<double>(ds.d, 1.0)};
  std::size_t count = 0;
  for (const auto& s : ds.samples) {
    for (std::size_t t = 0; t < s.length(); ++t) {
      for (std::size_t j = 0; j < ds.d; ++j) st.mean[j] += s.seq[t * ds.d + j];
    }
    count += s.length();
  }
  if (count == 0) return st;
  for (double& m : st.mean) m /= static_cast<double>(count);
  std::vector<double> var(ds.d, 0.0);
  for (const auto& s : ds.samples) {
    for (std::size_t t = 0; t < s.length(); ++t) {
      for (std::size_t j = 0; j < ds.d; ++j) {
        const double dv = s.seq[t * ds.d + j] - st.mean[j];
        var[j] += dv * dv;
      }
    }
  }
  for (std::size_t j = 0; j < ds.d; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(count));
    st.stddev[j] = sd > 1e-12 ? sd : 1.0;
  }
  return st;
}

Dataset Standardizer::apply(const Dataset& ds) const {
  if (mean.size() != ds.d || stddev.size() != ds.d) {
    throw ShapeError(fmt::format("standardizer fitted on {} features applied to {}", mean.size(), ds.d));
  }
  Dataset out = ds;
  for (auto& s : out.samples) {
    for (std::size_t t = 0; t < s.length(); ++t) {
      for (std::size_t j = 0; j < ds.d; ++j) {
        double& v = s.seq[t * ds.d + j];
        v = (v - mean[j]) / stddev[j];
      }
    }
  }
  return out;
}

}  // namespace dsts
