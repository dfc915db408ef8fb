#include "dsts/bench.hpp"

#include <algorithm>
#include <map>

#include "dsts/data.hpp"

namespace dsts {

ExperimentResult run_experiment(const GenConfig& gen, const ModelConfig& model, double test_frac, std::uint64_t seed,
                                Variant variant) {
  GenConfig g = gen;
  g.seed = seed;
  ModelConfig m = model;
  m.seed = seed;
  const Dataset ds = generate(g);
  const Split split = stratified_split(ds, test_frac, seed);
  const TrainResult trained = train(m, split.train, variant);
  const Labels pred = predict_dataset(trained.model, split.test);
  ExperimentResult r;
  r.separation = gen.separation;
  r.seed = seed;
  r.variant = variant;
  r.metrics = scores(confusion(split.test.labels(), pred));
  r.final_train_acc = trained.history.empty() ? 0.0 : trained.history.back().train_acc;
  return r;
}

BenchConfig BenchConfig::desk_scale() {
  BenchConfig cfg;
  cfg.gen.n_samples = 1000;
  cfg.gen.imbalance = 0.7;
  cfg.gen.seq_len = 128;
  cfg.model.d = kGazeFeatures;
  cfg.model.seq_len = 128;
  cfg.model.channels = {16, 32};
  cfg.model.kernels = {5, 3};
  cfg.model.epochs = 30;
  cfg.model.adam.lr = 3e-3;
  return cfg;
}

std::vector<double> accuracy_ranks(const std::vector<double>& accs) {
  std::vector<double> ranks(accs.size(), 0.0);
  for (std::size_t i = 0; i < accs.size(); ++i) {
    std::size_t better = 0;
    std::size_t equal = 0;
    for (std::size_t j = 0; j < accs.size(); ++j) {
      if (accs[j] > accs[i]) ++better;
      if (accs[j] == accs[i]) ++equal;
    }
    // Tied entries occupy ranks better+1 .. better+equal; share their mean.
    ranks[i] = static_cast<double>(better) + (static_cast<double>(equal) + 1.0) / 2.0;
  }
  return ranks;
}

namespace {

std::vector<VariantSummary> summarize(const std::vector<ExperimentResult>& runs, const std::vector<Variant>& variants,
                                      const std::map<const ExperimentResult*, double>& rank_of) {
  std::vector<VariantSummary> out;
  for (Variant v : variants) {
    VariantSummary s;
    s.variant = v;
    std::size_t n = 0;
    for (const auto& r : runs) {
      if (r.variant != v) continue;
      s.mean_acc += r.metrics.acc;
      s.mean_f1 += r.metrics.f1;
      s.mean_td_recall += r.metrics.per_class_recall[0];
      s.mean_rank += rank_of.at(&r);
      ++n;
    }
    if (n > 0) {
      const double dn = static_cast<double>(n);
      s.mean_acc /= dn;
      s.mean_f1 /= dn;
      s.mean_td_recall /= dn;
      s.mean_rank /= dn;
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

BenchReport run_bench(const BenchConfig& cfg, const BenchProgress& progress) {
  BenchReport report;
  for (double s : cfg.separations) {
    GenConfig gen = cfg.gen;
    gen.separation = s;
    for (std::uint64_t seed : cfg.seeds) {
      for (Variant v : cfg.variants) {
        report.runs.push_back(run_experiment(gen, cfg.model, cfg.test_frac, seed, v));
        if (progress) progress(report.runs.back());
      }
    }
  }

  std::map<const ExperimentResult*, double> rank_of;
  const std::size_t nv = cfg.variants.size();
  for (std::size_t cell = 0; cell + nv <= report.runs.size(); cell += nv) {
    std::vector<double> accs;
    for (std::size_t k = 0; k < nv; ++k) accs.push_back(report.runs[cell + k].metrics.acc);
    const auto ranks = accuracy_ranks(accs);
    for (std::size_t k = 0; k < nv; ++k) rank_of[&report.runs[cell + k]] = ranks[k];
  }
  report.summary = summarize(report.runs, cfg.variants, rank_of);
  for (double s : cfg.separations) {
    std::vector<ExperimentResult> subset;
    std::map<const ExperimentResult*, double> sub_rank;
    subset.reserve(report.runs.size());
    for (const auto& r : report.runs) {
      if (r.separation == s) subset.push_back(r);
    }
    for (std::size_t i = 0, j = 0; i < report.runs.size(); ++i) {
      if (report.runs[i].separation == s) sub_rank[&subset[j++]] = rank_of.at(&report.runs[i]);
    }
    report.by_separation.emplace_back(s, summarize(subset, cfg.variants, sub_rank));
  }
  return report;
}

nlohmann::json to_json(const BenchReport& report) {
  using nlohmann::json;
  auto summary_json = [](const std::vector<VariantSummary>& summary) {
    json out = json::array();
    for (const auto& s : summary) {
      out.push_back({{"variant", std::string(variant_name(s.variant))},
                     {"mean_acc", s.mean_acc},
                     {"mean_f1", s.mean_f1},
                     {"mean_td_recall", s.mean_td_recall},
                     {"mean_rank", s.mean_rank}});
    }
    return out;
  };
  json runs = json::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"separation", r.separation},
                    {"seed", r.seed},
                    {"variant", std::string(variant_name(r.variant))},
                    {"acc", r.metrics.acc},
                    {"f1", r.metrics.f1},
                    {"td_recall", r.metrics.per_class_recall[0]},
                    {"asd_recall", r.metrics.per_class_recall[1]},
                    {"final_train_acc", r.final_train_acc}});
  }
  json by_sep = json::array();
  for (const auto& [s, summary] : report.by_separation) {
    by_sep.push_back({{"separation", s}, {"summary", summary_json(summary)}});
  }
  return json{{"runs", runs}, {"summary", summary_json(report.summary)}, {"by_separation", by_sep}};
}

}  // namespace dsts
