#include "dsts/model.hpp"

#include <cmath>
#include <fmt/format.h>

#include "dsts/error.hpp"

namespace dsts {

void ModelConfig::validate() const {
  if (d == 0) throw ConfigError("feature count d must be positive");
  for (std::size_t c : channels) {
    if (c == 0) throw ConfigError("conv channel counts must be positive");
  }
  for (std::size_t k : kernels) {
    if (k % 2 == 0) throw ConfigError(fmt::format("conv kernel sizes must be odd, got {}", k));
  }
  if (num_classes < 2) throw ConfigError("num_classes must be at least 2");
  if (!(lambda_mix >= 0.0 && lambda_mix <= 1.0)) {
    throw ConfigError(fmt::format("lambda_mix must lie in [0, 1], got {}", lambda_mix));
  }
  ms.validate();
  adam.validate();
  if (batch_p == 0) throw ConfigError("batch_p must be positive");
  if (batch_k < 2) throw ConfigError("batch_k must be at least 2");
  if (seq_len == 0) throw ConfigError("seq_len must be positive");
  if (!(bn_momentum > 0.0 && bn_momentum <= 1.0)) throw ConfigError("bn_momentum must lie in (0, 1]");
  if (!(bn_eps > 0.0)) throw ConfigError("bn_eps must be positive");
}

std::string_view variant_name(Variant v) noexcept {
  switch (v) {
    case Variant::Full:
      return "full";
    case Variant::I:
      return "I";
    case Variant::II:
      return "II";
  }
  return "full";
}

Variant parse_variant(std::string_view name) {
  if (name == "full" || name == "Full") return Variant::Full;
  if (name == "I") return Variant::I;
  if (name == "II") return Variant::II;
  throw ConfigError(fmt::format("unknown variant '{}' (expected full, I or II)", name));
}

ParamMap ModelParams::learnable() const {
  return ParamMap{
      {"conv1.weight", conv1.weight}, {"conv1.bias", conv1.bias}, {"bn1.gamma", bn1.gamma},
      {"bn1.beta", bn1.beta},         {"conv2.weight", conv2.weight}, {"conv2.bias", conv2.bias},
      {"bn2.gamma", bn2.gamma},       {"bn2.beta", bn2.beta},     {"fc.weight", fc.weight},
      {"fc.bias", fc.bias},
  };
}

namespace {
void assign(Tensor& dst, const ParamMap& src, const std::string& name) {
  const auto it = src.find(name);
  if (it == src.end()) throw ShapeError("missing parameter '" + name + "'");
  if (it->second.shape() != dst.shape()) {
    throw ShapeError(fmt::format("parameter '{}' has shape {}, expected {}", name, shape_to_string(it->second.shape()),
                                 shape_to_string(dst.shape())));
  }
  dst = it->second;
}
}  // namespace

void ModelParams::set_learnable(const ParamMap& params) {
  assign(conv1.weight, params, "conv1.weight");
  assign(conv1.bias, params, "conv1.bias");
  assign(bn1.gamma, params, "bn1.gamma");
  assign(bn1.beta, params, "bn1.beta");
  assign(conv2.weight, params, "conv2.weight");
  assign(conv2.bias, params, "conv2.bias");
  assign(bn2.gamma, params, "bn2.gamma");
  assign(bn2.beta, params, "bn2.beta");
  assign(fc.weight, params, "fc.weight");
  assign(fc.bias, params, "fc.bias");
}

ParamMap ModelParams::running_stats() const {
  return ParamMap{{"bn1.running_mean", bn1.running_mean},
                  {"bn1.running_var", bn1.running_var},
                  {"bn2.running_mean", bn2.running_mean},
                  {"bn2.running_var", bn2.running_var}};
}

void ModelParams::set_running_stats(const ParamMap& stats) {
  assign(bn1.running_mean, stats, "bn1.running_mean");
  assign(bn1.running_var, stats, "bn1.running_var");
  assign(bn2.running_mean, stats, "bn2.running_mean");
  assign(bn2.running_var, stats, "bn2.running_var");
}

ModelParams build_model(const ModelConfig& cfg, Rng& rng) {
  cfg.validate();
  auto uniform_init = [&rng](Shape shape, std::size_t fan_in) {
    Tensor w(std::move(shape), 0.0);
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (double& v : w.data()) v = rng.uniform(-bound, bound);
    return w;
  };
  const auto [c1, c2] = cfg.channels;
  const auto [k1, k2] = cfg.kernels;
  ModelParams p;
  p.conv1 = ConvParams{uniform_init(Shape{c1, cfg.d, k1}, cfg.d * k1), Tensor(Shape{c1}, 0.0)};
  p.bn1 = BatchNormParams::identity(c1, cfg.bn_momentum, cfg.bn_eps);
  p.conv2 = ConvParams{uniform_init(Shape{c2, c1, k2}, c1 * k2), Tensor(Shape{c2}, 0.0)};
  p.bn2 = BatchNormParams::identity(c2, cfg.bn_momentum, cfg.bn_eps);
  p.fc = LinearParams{uniform_init(Shape{cfg.num_classes, c2}, c2), Tensor(Shape{cfg.num_classes}, 0.0)};
  return p;
}

ForwardTrace forward_trace(const ModelParams& p, const Tensor& x, Mode mode) {
  if (x.rank() != 3 || x.dim(2) == 0) {
    throw ShapeError("model input must be [B,d,T] with T >= 1, got " + shape_to_string(x.shape()));
  }
  ForwardTrace tr;
  tr.mode = mode;
  tr.x = x;
  tr.conv1_out = conv1d(x, p.conv1);
  tr.bn1 = batchnorm1d(tr.conv1_out, p.bn1, mode);
  tr.act1 = relu(tr.bn1.y);
  tr.conv2_out = conv1d(tr.act1, p.conv2);
  tr.bn2 = batchnorm1d(tr.conv2_out, p.bn2, mode);
  tr.act2 = relu(tr.bn2.y);
  tr.pool = global_maxpool_time(tr.act2);
  tr.logits = linear(tr.pool.e, p.fc);
  tr.probs = softmax(tr.logits);
  return tr;
}

ForwardResult forward(const ModelParams& p, const Tensor& x, Mode mode) {
  ForwardTrace tr = forward_trace(p, x, mode);
  ForwardResult out{tr.pool.e, tr.logits, tr.probs, std::nullopt};
  if (mode == Mode::Train) {
    out.running_stats = ParamMap{{"bn1.running_mean", tr.bn1.running_mean},
                                 {"bn1.running_var", tr.bn1.running_var},
                                 {"bn2.running_mean", tr.bn2.running_mean},
                                 {"bn2.running_var", tr.bn2.running_var}};
  }
  return out;
}

ParamMap backward(const ModelParams& p, const ForwardTrace& tr, const Tensor& d_embed, const Tensor& d_logits) {
  const LinearGrads fc = linear_backward(tr.pool.e, p.fc, d_logits);
  Tensor de = fc.de;
  de += d_embed;
  const Tensor d_act2 = global_maxpool_time_backward(tr.pool, de);
  const Tensor d_bn2_out = relu_backward(tr.bn2.y, d_act2);
  const BatchNormGrads bn2 = batchnorm1d_backward(tr.bn2, p.bn2, d_bn2_out);
  const ConvGrads conv2 = conv1d_backward(tr.act1, p.conv2, bn2.dx);
  const Tensor d_bn1_out = relu_backward(tr.bn1.y, conv2.dx);
  const BatchNormGrads bn1 = batchnorm1d_backward(tr.bn1, p.bn1, d_bn1_out);
  const ConvGrads conv1 = conv1d_backward(tr.x, p.conv1, bn1.dx);
  return ParamMap{
      {"conv1.weight", conv1.dweight}, {"conv1.bias", conv1.dbias},   {"bn1.gamma", bn1.dgamma},
      {"bn1.beta", bn1.dbeta},         {"conv2.weight", conv2.dweight}, {"conv2.bias", conv2.dbias},
      {"bn2.gamma", bn2.dgamma},       {"bn2.beta", bn2.dbeta},       {"fc.weight", fc.dweight},
      {"fc.bias", fc.dbias},
  };
}

namespace {

struct LossParts {
  ObjectiveTerms terms;
  Tensor d_embed;
  Tensor d_logits;
};

LossParts evaluate_losses(const ForwardTrace& tr, std::span<const int> labels, const ObjectiveSpec& spec) {
  if (!(spec.lambda_mix >= 0.0 && spec.lambda_mix <= 1.0)) {
    throw ConfigError(fmt::format("lambda_mix must lie in [0, 1], got {}", spec.lambda_mix));
  }
  LossParts out;
  const LossValue ia = weighted_ce(tr.logits, labels, spec.weights);
  out.terms.l_ia = ia.value;
  out.d_logits = (1.0 - spec.lambda_mix) * ia.grad;
  if (!spec.skip_car) {
    const Tensor& e = tr.embeddings();
    const Tensor S = cosine_similarity_matrix(e);
    const LossValue car = ms_loss(S, labels, spec.ms);
    out.terms.l_car = car.value;
    out.d_embed = cosine_similarity_backward(e, spec.lambda_mix * car.grad);
  } else {
    out.d_embed = Tensor(tr.embeddings().shape(), 0.0);
  }
  out.terms.l_total = total_loss(out.terms.l_car, out.terms.l_ia, spec.lambda_mix);
  return out;
}

}  // namespace

ObjectiveResult objective(const ModelParams& p, const Tensor& x, std::span<const int> labels,
                          const ObjectiveSpec& spec) {
  ObjectiveResult out;
  out.trace = forward_trace(p, x, Mode::Train);
  LossParts parts = evaluate_losses(out.trace, labels, spec);
  out.terms = parts.terms;
  out.grads = backward(p, out.trace, parts.d_embed, parts.d_logits);
  return out;
}

ObjectiveTerms objective_value(const ModelParams& p, const Tensor& x, std::span<const int> labels,
                               const ObjectiveSpec& spec) {
  const ForwardTrace tr = forward_trace(p, x, Mode::Train);
  return evaluate_losses(tr, labels, spec).terms;
}

Labels argmax_rows(const Tensor& scores) {
  const std::size_t rows = scores.dim(0);
  const std::size_t cols = scores.dim(1);
  Labels out(rows, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < cols; ++c) {
      if (scores[r * cols + c] > scores[r * cols + best]) best = c;
    }
    out[r] = static_cast<int>(best);
  }
  return out;
}

Labels predict(const ModelParams& p, const Tensor& x) {
  return argmax_rows(forward_trace(p, x, Mode::Eval).probs);
}

Tensor pack_batch(const Dataset& ds, std::span<const std::size_t> indices) {
  if (indices.empty()) return Tensor(Shape{0, ds.d, 0});
  const std::size_t len = ds.samples.at(indices[0]).length();
  const std::size_t d = ds.d;
  Tensor x(Shape{indices.size(), d, len}, 0.0);
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const Sample& s = ds.samples.at(indices[b]);
    if (s.length() != len || s.seq.dim(1) != d) {
      throw ShapeError(fmt::format("sample '{}' has shape {}, batch expects [{},{}]", s.id,
                                   shape_to_string(s.seq.shape()), len, d));
    }
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t j = 0; j < d; ++j) x[(b * d + j) * len + t] = s.seq[t * d + j];
    }
  }
  return x;
}

}  // namespace dsts
