#include "dsts/checkpoint.hpp"

#include <fmt/format.h>

#include "dsts/error.hpp"
#include "dsts/io.hpp"

namespace dsts {

using nlohmann::json;

namespace {

json tensor_json(const Tensor& t) { return json{{"shape", t.shape()}, {"data", t.values()}}; }

Tensor tensor_from_json(const json& j, const std::string& name) {
  try {
    return Tensor(j.at("shape").get<Shape>(), j.at("data").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw DataError(fmt::format("checkpoint tensor '{}': {}", name, e.what()));
  } catch (const ShapeError& e) {
    throw DataError(fmt::format("checkpoint tensor '{}': {}", name, e.what()));
  }
}

json map_json(const ParamMap& m) {
  json out = json::object();
  for (const auto& [name, t] : m) out[name] = tensor_json(t);
  return out;
}

ParamMap map_from_json(const json& j) {
  ParamMap out;
  for (const auto& [name, value] : j.items()) out.emplace(name, tensor_from_json(value, name));
  return out;
}

}  // namespace

std::string checkpoint_to_string(const Checkpoint& ck) {
  const TrainedModel& m = ck.model;
  json config = to_json(ck.config);
  json doc{
      {"format_version", kCheckpointFormatVersion},
      {"config", config},
      {"standardization", {{"mean", m.standardizer.mean}, {"std", m.standardizer.stddev}}},
      {"class_weights", m.weights.w},
      {"params", map_json(m.params.learnable())},
      {"running_stats", map_json(m.params.running_stats())},
  };
  return doc.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format_version", 0) != kCheckpointFormatVersion) {
    throw DataError(fmt::format("unsupported checkpoint format_version (expected {})", kCheckpointFormatVersion));
  }
  Checkpoint ck;
  try {
    ck.config = parse_run_config(doc.at("config"));
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint config: ") + e.what());
  }
  TrainedModel& m = ck.model;
  m.config = ck.config.model;
  m.variant = ck.config.variant;
  try {
    m.standardizer.mean = doc.at("standardization").at("mean").get<std::vector<double>>();
    m.standardizer.stddev = doc.at("standardization").at("std").get<std::vector<double>>();
    m.weights.w = doc.at("class_weights").get<std::vector<double>>();
    Rng unused(0);
    m.params = build_model(m.config, unused);
    m.params.set_learnable(map_from_json(doc.at("params")));
    m.params.set_running_stats(map_from_json(doc.at("running_stats")));
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  } catch (const ShapeError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  io::write_file_atomic(path, checkpoint_to_string(ck));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return checkpoint_from_string(io::read_file(path)); }

}  // namespace dsts
