#include "dsts/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <iostream>
#include <optional>

#include "dsts/bench.hpp"
#include "dsts/checkpoint.hpp"
#include "dsts/config.hpp"
#include "dsts/data.hpp"
#include "dsts/error.hpp"
#include "dsts/gradcheck.hpp"
#include "dsts/io.hpp"
#include "dsts/metrics.hpp"
#include "dsts/model.hpp"
#include "dsts/synthgaze.hpp"

namespace dsts::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class VerificationFailure : public Error {
 public:
  using Error::Error;
};

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> n_samples;
  std::optional<double> separation;
  std::optional<double> imbalance;
  std::optional<double> lambda_mix;
  std::optional<std::string> variant;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "seed for generation, splitting, initialization and batching");
    cmd->add_option("--epochs", epochs, "override model.epochs");
    cmd->add_option("--n-samples", n_samples, "override synth.n_samples");
    cmd->add_option("--separation", separation, "override synth.separation");
    cmd->add_option("--imbalance", imbalance, "override synth.imbalance");
    cmd->add_option("--lambda-mix", lambda_mix, "override model.lambda_mix");
  }

  RunConfig resolve(RunConfig base = {}) const {
    RunConfig cfg = config_path.empty() ? std::move(base) : load_run_config(config_path, std::move(base));
    if (seed) cfg.set_seed(*seed);
    if (epochs) cfg.model.epochs = *epochs;
    if (n_samples) cfg.synth.n_samples = *n_samples;
    if (separation) cfg.synth.separation = *separation;
    if (imbalance) cfg.synth.imbalance = *imbalance;
    if (lambda_mix) cfg.model.lambda_mix = *lambda_mix;
    if (variant) cfg.variant = parse_variant(*variant);
    cfg.validate();
    return cfg;
  }
};

Dataset load_for_model(const fs::path& dir, RunConfig& cfg) {
  Dataset ds = load_dataset(dir);
  if (!cfg.d_explicit) cfg.model.d = ds.d;
  if (ds.d != cfg.model.d) {
    throw DataError(fmt::format("data has {} features but model.d is {}", ds.d, cfg.model.d));
  }
  return ds;
}

struct EvalSet {
  const Dataset* data;
  const char* name;
};

EvalSet pick_eval_set(const Split& split) {
  if (split.test.empty()) return {&split.train, "train"};
  return {&split.test, "test"};
}

std::string metrics_document(const MetricsReport& report, const char* split_name, const RunConfig& cfg) {
  return to_json(report, {{"split", json(split_name).dump()},
                          {"variant", json(std::string(variant_name(cfg.variant))).dump()},
                          {"config", to_json(cfg).dump()}});
}

json history_json(const std::vector<EpochStats>& history) {
  json out = json::array();
  for (std::size_t e = 0; e < history.size(); ++e) {
    const EpochStats& h = history[e];
    out.push_back({{"epoch", e + 1}, {"l_car", h.l_car}, {"l_ia", h.l_ia}, {"l_total", h.l_total}, {"train_acc", h.train_acc}});
  }
  return out;
}

void print_report(const MetricsReport& r, const char* split_name) {
  std::cout << fmt::format("{} split: acc={:.4f} f1={:.4f} precision={:.4f} recall={:.4f} td_recall={:.4f} "
                           "(tp={} fp={} fn={} tn={})\n",
                           split_name, r.acc, r.f1, r.precision, r.recall, r.per_class_recall[0], r.counts.tp,
                           r.counts.fp, r.counts.fn, r.counts.tn);
}

// Trains one variant on the configured split and writes checkpoint/metrics/history files.
void train_and_report(RunConfig cfg, const Dataset& ds, const fs::path& model_out, const fs::path& metrics_out,
                      const fs::path& history_out) {
  const Split split = stratified_split(ds, cfg.test_frac, cfg.seed);
  const TrainResult trained = train(cfg.model, split.train, cfg.variant);
  const EvalSet eval = pick_eval_set(split);
  const MetricsReport report = scores(confusion(eval.data->labels(), predict_dataset(trained.model, *eval.data)));
  if (!model_out.empty()) save_checkpoint(Checkpoint{cfg, trained.model}, model_out);
  if (!metrics_out.empty()) io::write_file_atomic(metrics_out, metrics_document(report, eval.name, cfg));
  if (!history_out.empty()) {
    json doc{{"variant", std::string(variant_name(cfg.variant))},
             {"class_weights", trained.model.weights.w},
             {"config", to_json(cfg)},
             {"history", history_json(trained.history)}};
    io::write_file_atomic(history_out, doc.dump(1) + "\n");
  }
  const EpochStats last = trained.history.empty() ? EpochStats{} : trained.history.back();
  std::cout << fmt::format("variant {}: {} epochs, final l_total={:.6f} train_acc={:.4f}\n", variant_name(cfg.variant),
                           trained.history.size(), last.l_total, last.train_acc);
  print_report(report, eval.name);
}

int cmd_synth(const Overrides& ov, const fs::path& out) {
  const RunConfig cfg = ov.resolve();
  const Dataset ds = generate(cfg.synth);
  save_dataset(ds, out);
  io::write_file_atomic(out / "config.json", to_json(cfg).dump(1) + "\n");
  const auto counts = ds.class_counts();
  std::cout << fmt::format("wrote {} samples ({} TD, {} ASD) to {}\n", ds.size(), counts[0], counts[1], out.string());
  return kOk;
}

int cmd_train(const Overrides& ov, const fs::path& data, const fs::path& model_out, const fs::path& metrics_out,
              const fs::path& history_out) {
  RunConfig cfg = ov.resolve();
  const Dataset ds = load_for_model(data, cfg);
  train_and_report(cfg, ds, model_out, metrics_out, history_out);
  return kOk;
}

int cmd_eval(const fs::path& data, const fs::path& model_path, const fs::path& metrics_out, bool whole) {
  const Checkpoint ck = load_checkpoint(model_path);
  const Dataset ds = load_dataset(data);
  const Split split = stratified_split(ds, ck.config.test_frac, ck.config.seed);
  EvalSet eval = pick_eval_set(split);
  if (whole) eval = {&ds, "all"};
  const MetricsReport report = scores(confusion(eval.data->labels(), predict_dataset(ck.model, *eval.data)));
  if (!metrics_out.empty()) io::write_file_atomic(metrics_out, metrics_document(report, eval.name, ck.config));
  print_report(report, eval.name);
  return kOk;
}

int cmd_gradcheck(std::size_t seeds, const fs::path& report_out) {
  std::string report;
  std::size_t failures = 0;
  std::size_t total = 0;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    auto results = layer_gradchecks(seed);
    auto model = model_gradchecks(seed);
    results.insert(results.end(), model.begin(), model.end());
    for (const auto& r : results) {
      ++total;
      if (!r.passed()) ++failures;
      report += format_gradcheck_line(r) + "\n";
    }
  }
  report += fmt::format("{} of {} gradient checks passed\n", total - failures, total);
  std::cout << report;
  if (!report_out.empty()) io::write_file_atomic(report_out, report);
  if (failures > 0) throw VerificationFailure(fmt::format("{} gradient checks failed", failures));
  return kOk;
}

int cmd_ablate(const Overrides& ov, const fs::path& data, const fs::path& out_dir, std::vector<std::string> variants) {
  RunConfig cfg = ov.resolve();
  const Dataset ds = load_for_model(data, cfg);
  if (variants.empty() || (variants.size() == 1 && variants[0] == "all")) variants = {"full", "I", "II"};
  for (const auto& name : variants) {
    RunConfig vc = cfg;
    vc.variant = parse_variant(name);
    const std::string tag(variant_name(vc.variant));
    train_and_report(vc, ds, {}, out_dir / fmt::format("metrics_{}.json", tag), out_dir / fmt::format("history_{}.json", tag));
  }
  return kOk;
}

int cmd_bench(const Overrides& ov, const fs::path& out, std::size_t n_seeds) {
  const BenchConfig desk = BenchConfig::desk_scale();
  RunConfig base;
  base.model = desk.model;
  base.synth = desk.gen;
  const RunConfig cfg = ov.resolve(base);
  BenchConfig bc = desk;
  bc.model = cfg.model;
  bc.gen = cfg.synth;
  bc.test_frac = cfg.test_frac;
  bc.seeds.clear();
  for (std::uint64_t s = 1; s <= n_seeds; ++s) bc.seeds.push_back(cfg.seed + s);

  const BenchReport report = run_bench(bc, [](const ExperimentResult& r) {
    std::cout << fmt::format("s={:<5} seed={:<3} variant={:<4} acc={:.4f} f1={:.4f} td_recall={:.4f}\n", r.separation,
                             r.seed, variant_name(r.variant), r.metrics.acc, r.metrics.f1,
                             r.metrics.per_class_recall[0]);
  });
  json doc = to_json(report);
  doc["config"] = to_json(cfg);

  const auto find = [](const std::vector<VariantSummary>& summary, Variant v) {
    for (const auto& s : summary) {
      if (s.variant == v) return s;
    }
    throw Error("variant missing from bench summary");
  };
  const VariantSummary full = find(report.summary, Variant::Full);
  const VariantSummary v1 = find(report.summary, Variant::I);
  const VariantSummary v2 = find(report.summary, Variant::II);
  const auto& top = report.by_separation.back().second;
  const bool rank_ok = full.mean_rank <= v1.mean_rank && full.mean_rank <= v2.mean_rank;
  const bool acc_ok = find(top, Variant::Full).mean_acc >= 0.90;
  const bool recall_ok = find(top, Variant::Full).mean_td_recall > find(top, Variant::II).mean_td_recall;
  doc["checks"] = {{"full_mean_rank_le_variants", rank_ok},
                   {"full_acc_ge_0.90_at_highest_separation", acc_ok},
                   {"full_td_recall_gt_II_at_highest_separation", recall_ok}};
  if (!out.empty()) io::write_file_atomic(out, doc.dump(1) + "\n");

  for (const auto& s : report.summary) {
    std::cout << fmt::format("{:<4} mean_acc={:.4f} mean_f1={:.4f} mean_td_recall={:.4f} mean_rank={:.3f}\n",
                             variant_name(s.variant), s.mean_acc, s.mean_f1, s.mean_td_recall, s.mean_rank);
  }
  std::cout << fmt::format("ranking full<=I,II: {}; acc>=0.90 at s={}: {}; td_recall full>II: {}\n",
                           rank_ok ? "yes" : "no", report.by_separation.back().first, acc_ok ? "yes" : "no",
                           recall_ok ? "yes" : "no");
  if (!(rank_ok && acc_ok && recall_ok)) throw VerificationFailure("bench ordering checks failed");
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Gaze-sequence classifier: synthetic data, training, evaluation and verification"};
  app.require_subcommand(1);

  Overrides synth_ov;
  fs::path synth_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic labeled gaze dataset");
  synth_ov.attach(synth);
  synth->add_option("--out", synth_out, "output directory for data.csv and labels.csv")->required();

  Overrides train_ov;
  fs::path train_data, train_model, train_metrics, train_history;
  auto* train_cmd = app.add_subcommand("train", "train on a dataset directory and score the held-out split");
  train_ov.attach(train_cmd);
  train_cmd->add_option("--variant", train_ov.variant, "full | I | II");
  train_cmd->add_option("--data", train_data, "dataset directory")->required();
  train_cmd->add_option("--out", train_model, "checkpoint path")->required();
  train_cmd->add_option("--metrics", train_metrics, "metrics JSON path");
  train_cmd->add_option("--history", train_history, "per-epoch history JSON path");

  fs::path eval_data, eval_model, eval_metrics;
  bool eval_all = false;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on the held-out split of a dataset");
  eval_cmd->add_option("--data", eval_data, "dataset directory")->required();
  eval_cmd->add_option("--model", eval_model, "checkpoint path")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--metrics", eval_metrics, "metrics JSON path");
  eval_cmd->add_flag("--all", eval_all, "score every sample instead of the held-out split");

  std::size_t gc_seeds = 10;
  fs::path gc_report;
  auto* gc = app.add_subcommand("gradcheck", "verify every backward pass against central finite differences");
  gc->add_option("--seeds", gc_seeds, "number of random seeds")->check(CLI::PositiveNumber);
  gc->add_option("--report", gc_report, "write the per-check report here");

  Overrides ablate_ov;
  fs::path ablate_data, ablate_out;
  std::vector<std::string> ablate_variants;
  auto* ablate = app.add_subcommand("ablate", "train ablation variants and write one metrics file per variant");
  ablate_ov.attach(ablate);
  ablate->add_option("--data", ablate_data, "dataset directory")->required();
  ablate->add_option("--out-dir", ablate_out, "directory for metrics_<variant>.json")->required();
  ablate->add_option("--variant", ablate_variants, "full | I | II | all (repeatable)");

  Overrides bench_ov;
  fs::path bench_out;
  std::size_t bench_seeds = 5;
  auto* bench = app.add_subcommand("bench", "synthetic ablation benchmark over separations and seeds");
  bench_ov.attach(bench);
  bench->add_option("--out", bench_out, "report JSON path");
  bench->add_option("--seeds", bench_seeds, "number of seeds per separation")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) return cmd_synth(synth_ov, synth_out);
    if (*train_cmd) return cmd_train(train_ov, train_data, train_model, train_metrics, train_history);
    if (*eval_cmd) return cmd_eval(eval_data, eval_model, eval_metrics, eval_all);
    if (*gc) return cmd_gradcheck(gc_seeds, gc_report);
    if (*ablate) return cmd_ablate(ablate_ov, ablate_data, ablate_out, ablate_variants);
    if (*bench) return cmd_bench(bench_ov, bench_out, bench_seeds);
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kVerificationFailure;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("dsts");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace dsts::cli
