#include "dsts/config.hpp"

#include <fmt/format.h>
#include <set>

#include "dsts/error.hpp"
#include "dsts/io.hpp"

namespace dsts {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (allowed.count(key) == 0) throw ConfigError(fmt::format("unknown configuration key '{}{}'", where, key));
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    if constexpr (std::is_unsigned_v<T>) {
      if (!it->is_number_unsigned()) throw ConfigError("expected a non-negative integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError("expected a number");
    }
    out = it->get<T>();
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("configuration key '{}{}': {}", where, key, e.what()));
  }
}

void read_pair(const json& j, const char* key, std::array<std::size_t, 2>& out, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_unsigned() || !(*it)[1].is_number_unsigned()) {
    throw ConfigError(fmt::format("configuration key '{}{}' must be a list of two non-negative integers", where, key));
  }
  out = {(*it)[0].get<std::size_t>(), (*it)[1].get<std::size_t>()};
}

void read_disc(const json& j, const char* key, Disc& out, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  const std::string sub = where + key + ".";
  reject_unknown(*it, {"cx", "cy", "radius"}, sub);
  read(*it, "cx", out.cx, sub);
  read(*it, "cy", out.cy, sub);
  read(*it, "radius", out.radius, sub);
}

json disc_json(const Disc& d) { return json{{"cx", d.cx}, {"cy", d.cy}, {"radius", d.radius}}; }

}  // namespace

void RunConfig::validate() const {
  model.validate();
  synth.validate();
  if (!(test_frac >= 0.0 && test_frac < 1.0)) {
    throw ConfigError(fmt::format("test_frac must lie in [0, 1), got {}", test_frac));
  }
}

RunConfig parse_run_config(const json& j, RunConfig base) {
  RunConfig cfg = std::move(base);
  reject_unknown(j, {"seed", "test_frac", "variant", "model", "synth"}, "");
  std::uint64_t seed = cfg.seed;
  read(j, "seed", seed, "");
  read(j, "test_frac", cfg.test_frac, "");
  if (const auto it = j.find("variant"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("configuration key 'variant' must be a string");
    cfg.variant = parse_variant(it->get<std::string>());
  }

  if (const auto it = j.find("model"); it != j.end()) {
    const json& m = *it;
    const std::string w = "model.";
    reject_unknown(m,
                   {"d", "channels", "kernels", "num_classes", "lambda_mix", "alpha", "beta", "lambda_margin", "lr",
                    "beta1", "beta2", "adam_eps", "batch_p", "batch_k", "epochs", "seq_len", "bn_momentum", "bn_eps"},
                   w);
    ModelConfig& mc = cfg.model;
    cfg.d_explicit = cfg.d_explicit || m.contains("d");
    read(m, "d", mc.d, w);
    read_pair(m, "channels", mc.channels, w);
    read_pair(m, "kernels", mc.kernels, w);
    read(m, "num_classes", mc.num_classes, w);
    read(m, "lambda_mix", mc.lambda_mix, w);
    read(m, "alpha", mc.ms.alpha, w);
    read(m, "beta", mc.ms.beta, w);
    read(m, "lambda_margin", mc.ms.lambda_margin, w);
    read(m, "lr", mc.adam.lr, w);
    read(m, "beta1", mc.adam.beta1, w);
    read(m, "beta2", mc.adam.beta2, w);
    read(m, "adam_eps", mc.adam.eps, w);
    read(m, "batch_p", mc.batch_p, w);
    read(m, "batch_k", mc.batch_k, w);
    read(m, "epochs", mc.epochs, w);
    read(m, "seq_len", mc.seq_len, w);
    read(m, "bn_momentum", mc.bn_momentum, w);
    read(m, "bn_eps", mc.bn_eps, w);
  }

  if (const auto it = j.find("synth"); it != j.end()) {
    const json& s = *it;
    const std::string w = "synth.";
    reject_unknown(s,
                   {"n_samples", "imbalance", "separation", "seq_len", "social_roi", "nonsocial_roi",
                    "td_duration_mean", "asd_duration_mean", "duration_sigma", "saccade_steps", "jitter"},
                   w);
    GenConfig& g = cfg.synth;
    read(s, "n_samples", g.n_samples, w);
    read(s, "imbalance", g.imbalance, w);
    read(s, "separation", g.separation, w);
    read(s, "seq_len", g.seq_len, w);
    read_disc(s, "social_roi", g.social_roi, w);
    read_disc(s, "nonsocial_roi", g.nonsocial_roi, w);
    read(s, "td_duration_mean", g.td_duration_mean, w);
    read(s, "asd_duration_mean", g.asd_duration_mean, w);
    read(s, "duration_sigma", g.duration_sigma, w);
    read(s, "saccade_steps", g.saccade_steps, w);
    read(s, "jitter", g.jitter, w);
  }
  cfg.set_seed(seed);
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  const std::string text = io::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return parse_run_config(j, std::move(base));
}

json to_json(const RunConfig& cfg) {
  const ModelConfig& m = cfg.model;
  const GenConfig& g = cfg.synth;
  return json{
      {"seed", cfg.seed},
      {"test_frac", cfg.test_frac},
      {"variant", std::string(variant_name(cfg.variant))},
      {"model",
       {{"d", m.d},
        {"channels", {m.channels[0], m.channels[1]}},
        {"kernels", {m.kernels[0], m.kernels[1]}},
        {"num_classes", m.num_classes},
        {"lambda_mix", m.lambda_mix},
        {"alpha", m.ms.alpha},
        {"beta", m.ms.beta},
        {"lambda_margin", m.ms.lambda_margin},
        {"lr", m.adam.lr},
        {"beta1", m.adam.beta1},
        {"beta2", m.adam.beta2},
        {"adam_eps", m.adam.eps},
        {"batch_p", m.batch_p},
        {"batch_k", m.batch_k},
        {"epochs", m.epochs},
        {"seq_len", m.seq_len},
        {"bn_momentum", m.bn_momentum},
        {"bn_eps", m.bn_eps}}},
      {"synth",
       {{"n_samples", g.n_samples},
        {"imbalance", g.imbalance},
        {"separation", g.separation},
        {"seq_len", g.seq_len},
        {"social_roi", disc_json(g.social_roi)},
        {"nonsocial_roi", disc_json(g.nonsocial_roi)},
        {"td_duration_mean", g.td_duration_mean},
        {"asd_duration_mean", g.asd_duration_mean},
        {"duration_sigma", g.duration_sigma},
        {"saccade_steps", g.saccade_steps},
        {"jitter", g.jitter}}},
  };
}

}  // namespace dsts
