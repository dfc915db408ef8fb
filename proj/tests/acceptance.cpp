// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "dsts/bench.hpp"
#include "dsts/cli.hpp"
#include "dsts/data.hpp"
#include "dsts/error.hpp"
#include "dsts/gradcheck.hpp"
#include "dsts/io.hpp"
#include "dsts/layers.hpp"
#include "dsts/losses.hpp"
#include "dsts/model.hpp"
#include "dsts/synthgaze.hpp"
#include "oracles.hpp"

namespace dsts {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Outcome gradient_oracle() {
  const auto start = Clock::now();
  double worst_layer = 0.0, worst_model = 0.0;
  std::size_t failed = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (const auto& r : layer_gradchecks(seed)) {
      worst_layer = std::max(worst_layer, r.max_rel_error);
      failed += r.passed() ? 0 : 1;
      ++total;
    }
    for (const auto& r : model_gradchecks(seed)) {
      worst_model = std::max(worst_model, r.max_rel_error);
      failed += r.passed() ? 0 : 1;
      ++total;
    }
  }
  const double elapsed = seconds_since(start);
  return {failed == 0 && elapsed < 60.0,
          fmt::format("{}/{} checks over 10 seeds; worst layer {:.2e} (< 1e-5), worst model {:.2e} (< 1e-4); {:.1f}s",
                      total - failed, total, worst_layer, worst_model, elapsed)};
}

Outcome brute_force_equivalence() {
  Rng rng(20240);
  double conv_err = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t B = 1 + rng.index(4), Cin = 1 + rng.index(6), Cout = 1 + rng.index(6);
    const std::size_t k = 2 * rng.index(4) + 1, T = 1 + rng.index(40);
    const Tensor x = testing::random_tensor({B, Cin, T}, rng);
    const ConvParams p{testing::random_tensor({Cout, Cin, k}, rng), testing::random_tensor({Cout}, rng)};
    const Tensor y = conv1d(x, p);
    const Tensor ref = testing::naive_conv1d(x, p.weight, p.bias);
    for (std::size_t i = 0; i < y.size(); ++i) conv_err = std::max(conv_err, std::abs(y[i] - ref[i]));
  }
  double ms_err = 0.0;
  const MsHyper h;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t B = 2 + rng.index(7);
    Labels y(B);
    for (auto& v : y) v = static_cast<int>(rng.index(2));
    const Tensor S = cosine_similarity_matrix(testing::random_tensor({B, 4}, rng));
    ms_err = std::max(ms_err, std::abs(ms_loss(S, y, h).value -
                                       testing::naive_ms_loss(S, y, h.alpha, h.beta, h.lambda_margin)));
  }
  return {conv_err <= 1e-12 && ms_err <= 1e-12,
          fmt::format("conv1d max |diff| {:.2e} over 100 shapes; ms_loss max |diff| {:.2e} over 100 batches (B<=8)",
                      conv_err, ms_err)};
}

Outcome overfit_sanity() {
  const auto start = Clock::now();
  GenConfig g;
  g.n_samples = 32;
  g.imbalance = 0.5;
  g.separation = 1.0;
  g.seed = 3;
  ModelConfig m;
  m.epochs = 200;
  m.seed = 3;
  const TrainResult r = train(m, generate(g), Variant::Full);
  std::size_t first = 0;
  for (std::size_t e = 0; e < r.history.size() && first == 0; ++e) {
    if (r.history[e].train_acc == 1.0) first = e + 1;
  }
  const double elapsed = seconds_since(start);
  const double final_acc = r.history.back().train_acc;
  return {final_acc == 1.0 && elapsed < 60.0,
          fmt::format("final train acc {:.4f} after 200 epochs (first 1.0 at epoch {}); {:.1f}s", final_acc, first,
                      elapsed)};
}

const VariantSummary& find(const std::vector<VariantSummary>& rows, Variant v) {
  for (const auto& r : rows) {
    if (r.variant == v) return r;
  }
  throw Error("variant missing from bench summary");
}

Outcome synthetic_generalization(const BenchReport& bench) {
  double top = 0.0;
  const std::vector<VariantSummary>* rows = nullptr;
  for (const auto& [s, summary] : bench.by_separation) {
    if (s == 0.8) {
      top = s;
      rows = &summary;
    }
  }
  if (rows == nullptr) return {false, "bench grid has no s=0.8 cell"};
  const VariantSummary& full = find(*rows, Variant::Full);
  const VariantSummary& v2 = find(*rows, Variant::II);
  return {full.mean_acc >= 0.90 && full.mean_td_recall > v2.mean_td_recall,
          fmt::format("s={}: full mean test ACC {:.4f} (>= 0.90); TD recall full {:.4f} vs II {:.4f}", top,
                      full.mean_acc, full.mean_td_recall, v2.mean_td_recall)};
}

Outcome ablation_ordering(const BenchReport& bench) {
  const VariantSummary& full = find(bench.summary, Variant::Full);
  const VariantSummary& v1 = find(bench.summary, Variant::I);
  const VariantSummary& v2 = find(bench.summary, Variant::II);
  return {full.mean_rank <= v1.mean_rank && full.mean_rank <= v2.mean_rank,
          fmt::format("mean ACC rank over {} runs: full {:.3f}, I {:.3f}, II {:.3f}; mean ACC full {:.4f}, I {:.4f}, "
                      "II {:.4f}",
                      bench.runs.size(), full.mean_rank, v1.mean_rank, v2.mean_rank, full.mean_acc, v1.mean_acc,
                      v2.mean_acc)};
}

Outcome hand_values() {
  const double ce = weighted_ce(Tensor::matrix({{0, 0}}), Labels{0}, ClassWeights{{2.0, 1.0}}).value;
  const MsHyper h;
  const double ms = ms_loss(Tensor::matrix({{1.0, h.lambda_margin}, {h.lambda_margin, 1.0}}), Labels{0, 1}, h).value;
  Labels y(966, kLabelASD);
  y.insert(y.end(), 422, kLabelTD);
  const ClassWeights w = class_weights(y);
  const double ce_err = std::abs(ce - 2.0 * std::numbers::ln2);
  const double ms_err = std::abs(ms - std::numbers::ln2 / 50.0);
  const bool ok = ce_err <= 1e-12 && ms_err <= 1e-12 && std::abs(w.w[kLabelASD] - 0.71843) <= 1e-5 &&
                  std::abs(w.w[kLabelTD] - 1.64455) <= 1e-5;
  return {ok, fmt::format("weighted CE {:.15f} (err {:.1e}); ms_loss {:.15f} (err {:.1e}); weights ASD {:.5f} TD {:.5f}",
                          ce, ce_err, ms, ms_err, w.w[kLabelASD], w.w[kLabelTD])};
}

Outcome cli_determinism() {
  testing::TempDir dir("acceptance_cli");
  io::write_file_atomic(dir / "cfg.json", R"({
    "synth": {"n_samples": 120, "separation": 0.8},
    "model": {"channels": [8, 16], "epochs": 3}})");
  const std::string cfg = (dir / "cfg.json").string();
  std::vector<std::string> files;
  for (const std::string run : {"a", "b"}) {
    const auto d = dir / run;
    const std::string data = (d / "data").string();
    int rc = cli::run({"synth", "--config", cfg, "--out", data, "--seed", "42"});
    rc |= cli::run({"train", "--data", data, "--config", cfg, "--out", (d / "model.json").string(), "--metrics",
                    (d / "train_metrics.json").string(), "--history", (d / "history.json").string(), "--seed", "7"});
    rc |= cli::run({"eval", "--data", data, "--model", (d / "model.json").string(), "--metrics",
                    (d / "eval_metrics.json").string()});
    if (rc != 0) return {false, "a command exited nonzero"};
  }
  const std::vector<std::string> outputs{"data/data.csv",      "data/labels.csv",   "data/config.json",
                                         "model.json",         "train_metrics.json", "history.json",
                                         "eval_metrics.json"};
  std::size_t identical = 0;
  for (const auto& f : outputs) {
    if (io::read_file(dir / "a" / f) == io::read_file(dir / "b" / f)) ++identical;
  }
  const bool eval_matches = io::read_file(dir / "a" / "train_metrics.json") ==
                            io::read_file(dir / "a" / "eval_metrics.json");
  return {identical == outputs.size() && eval_matches,
          fmt::format("{}/{} output files byte-identical across reruns; eval metrics {} train metrics", identical,
                      outputs.size(), eval_matches ? "equal" : "differ from")};
}

Outcome null_separation(const BenchConfig& desk) {
  GenConfig g = desk.gen;
  g.separation = 0.0;
  double mean = 0.0;
  std::string accs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ExperimentResult r = run_experiment(g, desk.model, desk.test_frac, seed, Variant::Full);
    mean += r.metrics.acc / 5.0;
    accs += fmt::format("{}{:.3f}", accs.empty() ? "" : " ", r.metrics.acc);
  }
  return {std::abs(mean - 0.7) <= 0.05, fmt::format("s=0 mean test ACC {:.4f} (target 0.70 +- 0.05); per seed [{}]",
                                                     mean, accs)};
}

}  // namespace
}  // namespace dsts

int main() {
  using namespace dsts;
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  const BenchConfig desk = BenchConfig::desk_scale();
  BenchReport bench;
  bool bench_done = false;
  const auto get_bench = [&]() -> const BenchReport& {
    if (!bench_done) {
      bench = run_bench(desk);
      bench_done = true;
    }
    return bench;
  };

  criteria.emplace_back("AC-1 gradient oracle", gradient_oracle);
  criteria.emplace_back("AC-2 brute-force equivalence", brute_force_equivalence);
  criteria.emplace_back("AC-3 overfit sanity", overfit_sanity);
  criteria.emplace_back("AC-4 synthetic generalization", [&] { return synthetic_generalization(get_bench()); });
  criteria.emplace_back("AC-5 ablation ordering", [&] { return ablation_ordering(get_bench()); });
  criteria.emplace_back("AC-6 hand values", hand_values);
  criteria.emplace_back("AC-7 determinism", cli_determinism);
  criteria.emplace_back("AC-8 null separation", [&] { return null_separation(desk); });

  std::size_t failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << fmt::format("{} {}: {}", o.pass ? "PASS" : "FAIL", name, o.detail) << std::endl;
  }
  std::cout << fmt::format("{} of {} acceptance criteria passed", criteria.size() - failed, criteria.size())
            << std::endl;
  return failed == 0 ? 0 : 1;
}
