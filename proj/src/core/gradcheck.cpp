#include "dsts/gradcheck.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>

#include "dsts/finite_diff.hpp"
#include "dsts/layers.hpp"
#include "dsts/losses.hpp"
#include "dsts/model.hpp"
#include "dsts/rng.hpp"

namespace dsts {

namespace {

Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape), 0.0);
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

// Values bounded away from zero so a +-h probe never crosses the ReLU kink.
Tensor away_from_zero(Shape shape, Rng& rng) {
  Tensor t(std::move(shape), 0.0);
  for (double& v : t.data()) v = (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(0.1, 1.0);
  return t;
}

class Checker {
 public:
  explicit Checker(std::uint64_t seed) : seed_(seed) {}

  void check(const std::string& name, const Tensor& analytic, const ScalarFn& f, const Tensor& at,
             double tol = kLayerGradTolerance) {
    const Tensor numeric = finite_diff_grad(f, at, kGradCheckStep);
    results_.push_back({name, seed_, max_relative_error(analytic, numeric), tol});
  }

  std::vector<GradCheckResult> take() { return std::move(results_); }

 private:
  std::uint64_t seed_;
  std::vector<GradCheckResult> results_;
};

constexpr std::size_t kB = 4, kCin = 3, kT = 16, kCout = 5, kK = 3;

void conv_checks(Checker& ck, Rng& rng) {
  const Tensor x = random_tensor({kB, kCin, kT}, rng);
  const ConvParams p{random_tensor({kCout, kCin, kK}, rng), random_tensor({kCout}, rng)};
  const Tensor R = random_tensor({kB, kCout, kT}, rng);
  const ConvGrads g = conv1d_backward(x, p, R);
  ck.check("conv1d.dx", g.dx, [&](const Tensor& v) { return inner(R, conv1d(v, p)); }, x);
  ck.check("conv1d.dweight", g.dweight,
           [&](const Tensor& w) { return inner(R, conv1d(x, ConvParams{w, p.bias})); }, p.weight);
  ck.check("conv1d.dbias", g.dbias, [&](const Tensor& b) { return inner(R, conv1d(x, ConvParams{p.weight, b})); },
           p.bias);
}

void batchnorm_checks(Checker& ck, Rng& rng) {
  Tensor x = random_tensor({kB, kCout, kT}, rng, -2.0, 3.0);
  BatchNormParams p = BatchNormParams::identity(kCout);
  p.gamma = random_tensor({kCout}, rng, 0.5, 1.5);
  p.beta = random_tensor({kCout}, rng);
  p.running_mean = random_tensor({kCout}, rng);
  p.running_var = random_tensor({kCout}, rng, 0.5, 2.0);
  const Tensor R = random_tensor({kB, kCout, kT}, rng);
  for (Mode mode : {Mode::Train, Mode::Eval}) {
    const std::string tag = mode == Mode::Train ? "batchnorm1d[train]" : "batchnorm1d[eval]";
    const BatchNormOutput fwd = batchnorm1d(x, p, mode);
    const BatchNormGrads g = batchnorm1d_backward(fwd, p, R);
    ck.check(tag + ".dx", g.dx, [&](const Tensor& v) { return inner(R, batchnorm1d(v, p, mode).y); }, x);
    ck.check(tag + ".dgamma", g.dgamma,
             [&](const Tensor& gm) {
               BatchNormParams q = p;
               q.gamma = gm;
               return inner(R, batchnorm1d(x, q, mode).y);
             },
             p.gamma);
    ck.check(tag + ".dbeta", g.dbeta,
             [&](const Tensor& bt) {
               BatchNormParams q = p;
               q.beta = bt;
               return inner(R, batchnorm1d(x, q, mode).y);
             },
             p.beta);
  }
}

void elementwise_checks(Checker& ck, Rng& rng) {
  const Tensor x = away_from_zero({kB, kCout, kT}, rng);
  const Tensor R = random_tensor({kB, kCout, kT}, rng);
  ck.check("relu.dx", relu_backward(x, R), [&](const Tensor& v) { return inner(R, relu(v)); }, x);

  const Tensor z = random_tensor({kB, kCout, kT}, rng);
  const Tensor Re = random_tensor({kB, kCout}, rng);
  ck.check("global_maxpool_time.dz", global_maxpool_time_backward(global_maxpool_time(z), Re),
           [&](const Tensor& v) { return inner(Re, global_maxpool_time(v).e); }, z);
}

void head_checks(Checker& ck, Rng& rng) {
  const std::size_t emb = 6;
  const std::size_t classes = 3;
  const Tensor e = random_tensor({kB, emb}, rng);
  const LinearParams p{random_tensor({classes, emb}, rng), random_tensor({classes}, rng)};
  const Tensor R = random_tensor({kB, classes}, rng);
  const LinearGrads g = linear_backward(e, p, R);
  ck.check("linear.de", g.de, [&](const Tensor& v) { return inner(R, linear(v, p)); }, e);
  ck.check("linear.dweight", g.dweight, [&](const Tensor& w) { return inner(R, linear(e, LinearParams{w, p.bias})); },
           p.weight);
  ck.check("linear.dbias", g.dbias, [&](const Tensor& b) { return inner(R, linear(e, LinearParams{p.weight, b})); },
           p.bias);

  const Tensor logits = random_tensor({kB, classes}, rng, -3.0, 3.0);
  ck.check("softmax.dlogits", softmax_backward(softmax(logits), R),
           [&](const Tensor& v) { return inner(R, softmax(v)); }, logits);

  const Labels labels{0, 2, 1, 2};
  const ClassWeights w{{0.7, 1.6, 1.1}};
  ck.check("weighted_ce.dlogits", weighted_ce(logits, labels, w).grad,
           [&](const Tensor& v) { return weighted_ce(v, labels, w).value; }, logits);
}

void similarity_checks(Checker& ck, Rng& rng) {
  const std::size_t batch = 6;
  const Tensor E = random_tensor({batch, 5}, rng);
  const Tensor R = random_tensor({batch, batch}, rng);
  ck.check("cosine_similarity.dE", cosine_similarity_backward(E, R),
           [&](const Tensor& v) { return inner(R, cosine_similarity_matrix(v)); }, E);

  Labels labels(batch);
  for (std::size_t i = 0; i < batch; ++i) labels[i] = static_cast<int>(i % 2);
  rng.shuffle(std::span<int>(labels));
  Tensor S(Shape{batch, batch}, 1.0);
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t k = i + 1; k < batch; ++k) {
      const double v = rng.uniform(-1.0, 1.0);
      S[i * batch + k] = v;
      S[k * batch + i] = v;
    }
  }
  const MsHyper h;
  ck.check("ms_loss.dS", ms_loss(S, labels, h).grad, [&](const Tensor& v) { return ms_loss(v, labels, h).value; }, S);
}

}  // namespace

std::vector<GradCheckResult> layer_gradchecks(std::uint64_t seed) {
  Checker ck(seed);
  Rng rng(seed);
  conv_checks(ck, rng);
  batchnorm_checks(ck, rng);
  elementwise_checks(ck, rng);
  head_checks(ck, rng);
  similarity_checks(ck, rng);
  return ck.take();
}

std::vector<GradCheckResult> model_gradchecks(std::uint64_t seed) {
  Rng rng(seed);
  ModelConfig cfg;
  cfg.d = 4;
  cfg.channels = {4, 6};
  cfg.kernels = {5, 3};
  ModelParams params = build_model(cfg, rng);
  // Move batch norm away from its identity initialization.
  params.bn1.gamma = random_tensor({4}, rng, 0.5, 1.5);
  params.bn1.beta = random_tensor({4}, rng, -0.5, 0.5);
  params.bn2.gamma = random_tensor({6}, rng, 0.5, 1.5);
  params.bn2.beta = random_tensor({6}, rng, -0.5, 0.5);
  params.conv1.bias = random_tensor({4}, rng, -0.2, 0.2);
  params.conv2.bias = random_tensor({6}, rng, -0.2, 0.2);

  const std::size_t batch = 8;
  const Tensor x = random_tensor({batch, cfg.d, 16}, rng, -2.0, 2.0);
  const Labels labels{0, 0, 0, 0, 1, 1, 1, 1};
  ObjectiveSpec spec;
  spec.lambda_mix = cfg.lambda_mix;
  spec.ms = cfg.ms;
  spec.weights = ClassWeights{{1.64, 0.72}};

  const ObjectiveResult obj = objective(params, x, labels, spec);
  const ParamMap base = params.learnable();
  // Errors are scaled by the largest entry of the full parameter gradient.
  std::map<std::string, Tensor> numeric;
  double scale = 0.0;
  for (const auto& [name, value] : base) {
    auto f = [&, name = name](const Tensor& v) {
      ModelParams q = params;
      ParamMap m = base;
      m.at(name) = v;
      q.set_learnable(m);
      return objective_value(q, x, labels, spec).l_total;
    };
    numeric[name] = finite_diff_grad(f, value, kGradCheckStep);
    scale = std::max({scale, max_abs(numeric[name]), max_abs(obj.grads.at(name))});
  }
  std::vector<GradCheckResult> out;
  for (const auto& [name, num] : numeric) {
    out.push_back({"model." + name, seed, max_relative_error(obj.grads.at(name), num, scale, 1e-8),
                   kModelGradTolerance});
  }
  return out;
}

std::string format_gradcheck_line(const GradCheckResult& r) {
  return fmt::format("{} {:<32} seed={:<3} max_rel_err={:.3e} tol={:.0e}", r.passed() ? "PASS" : "FAIL", r.name, r.seed,
                     r.max_rel_error, r.tolerance);
}

}  // namespace dsts
