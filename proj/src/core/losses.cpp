#include "dsts/losses.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "dsts/error.hpp"
#include "dsts/simd/kernels.hpp"

namespace dsts {

namespace {
constexpr double kNormFloor = 1e-12;

void check_labels(std::span<const int> labels, std::size_t batch, std::size_t classes, const char* op) {
  if (labels.size() != batch) {
    throw ShapeError(fmt::format("{}: {} labels for a batch of {}", op, labels.size(), batch));
  }
  for (int y : labels) {
    if (y < 0 || (classes > 0 && static_cast<std::size_t>(y) >= classes)) {
      throw ConfigError(fmt::format("{}: label {} outside [0, {})", op, y, classes));
    }
  }
}

// ln(1 + sum_k exp(a_k)), evaluated with the implicit zero exponent included in the max shift.
struct SoftplusSum {
  double value;
  double shift;
  double denom;  // exp(-shift) + sum_k exp(a_k - shift)
};

SoftplusSum log1p_sum_exp(std::span<const double> exponents) {
  double m = 0.0;
  for (double a : exponents) m = std::max(m, a);
  double denom = std::exp(-m);
  for (double a : exponents) denom += std::exp(a - m);
  return {m + std::log(denom), m, denom};
}
}  // namespace

void MsHyper::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw ConfigError(fmt::format("multi-similarity alpha and beta must be positive (alpha={}, beta={})", alpha, beta));
  }
  if (!(lambda_margin >= -1.0 && lambda_margin <= 1.0)) {
    throw ConfigError(fmt::format("multi-similarity margin must lie in [-1, 1], got {}", lambda_margin));
  }
}

void ClassWeights::validate() const {
  for (double v : w) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(fmt::format("class weight {} is not positive", v));
  }
}

Tensor cosine_similarity_matrix(const Tensor& embeddings) {
  if (embeddings.rank() != 2) {
    throw ShapeError("cosine_similarity_matrix expects [B,D], got " + shape_to_string(embeddings.shape()));
  }
  const std::size_t batch = embeddings.dim(0);
  const std::size_t dim = embeddings.dim(1);
  const auto& kern = simd::active();
  const double* e = embeddings.data().data();
  std::vector<double> norm(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    norm[i] = std::max(std::sqrt(kern.dot(e + i * dim, e + i * dim, dim)), kNormFloor);
  }
  Tensor S(Shape{batch, batch}, 0.0);
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t k = i; k < batch; ++k) {
      const double v = kern.dot(e + i * dim, e + k * dim, dim) / (norm[i] * norm[k]);
      S[i * batch + k] = v;
      S[k * batch + i] = v;
    }
  }
  return S;
}

Tensor cosine_similarity_backward(const Tensor& embeddings, const Tensor& dS) {
  const std::size_t batch = embeddings.dim(0);
  const std::size_t dim = embeddings.dim(1);
  if (dS.shape() != Shape{batch, batch}) {
    throw ShapeError("cosine_similarity_backward gradient has shape " + shape_to_string(dS.shape()));
  }
  const auto& kern = simd::active();
  const double* e = embeddings.data().data();

  // S = U U^T with rows u_i = e_i / n_i, so dU = (dS + dS^T) U.
  std::vector<double> norm(batch);
  std::vector<bool> clamped(batch);
  Tensor U(embeddings.shape(), 0.0);
  for (std::size_t i = 0; i < batch; ++i) {
    const double raw = std::sqrt(kern.dot(e + i * dim, e + i * dim, dim));
    clamped[i] = raw <= kNormFloor;
    norm[i] = std::max(raw, kNormFloor);
    kern.affine(e + i * dim, 1.0 / norm[i], 0.0, U.data().data() + i * dim, dim);
  }
  Tensor dU(embeddings.shape(), 0.0);
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t k = 0; k < batch; ++k) {
      const double g = dS[i * batch + k] + dS[k * batch + i];
      if (g != 0.0) kern.axpy(g, U.data().data() + k * dim, dU.data().data() + i * dim, dim);
    }
  }
  // de_i = (du_i - u_i <u_i, du_i>) / n_i; with a clamped norm the map is linear.
  Tensor dE(embeddings.shape(), 0.0);
  for (std::size_t i = 0; i < batch; ++i) {
    const double* u = U.data().data() + i * dim;
    const double* du = dU.data().data() + i * dim;
    double* de = dE.data().data() + i * dim;
    const double proj = clamped[i] ? 0.0 : kern.dot(u, du, dim);
    for (std::size_t j = 0; j < dim; ++j) de[j] = (du[j] - u[j] * proj) / norm[i];
  }
  return dE;
}

LossValue ms_loss(const Tensor& S, std::span<const int> labels, const MsHyper& h) {
  h.validate();
  if (S.rank() != 2 || S.dim(0) != S.dim(1)) {
    throw ShapeError("ms_loss expects a square similarity matrix, got " + shape_to_string(S.shape()));
  }
  const std::size_t batch = S.dim(0);
  check_labels(labels, batch, 0, "ms_loss");

  LossValue out{0.0, Tensor(S.shape(), 0.0)};
  if (batch == 0) return out;
  const double inv_b = 1.0 / static_cast<double>(batch);
  std::vector<double> pos_exp;
  std::vector<double> neg_exp;
  std::vector<std::size_t> pos_idx;
  std::vector<std::size_t> neg_idx;
  for (std::size_t i = 0; i < batch; ++i) {
    pos_exp.clear();
    neg_exp.clear();
    pos_idx.clear();
    neg_idx.clear();
    for (std::size_t k = 0; k < batch; ++k) {
      if (k == i) continue;
      const double s = S[i * batch + k];
      if (labels[k] == labels[i]) {
        pos_exp.push_back(-h.alpha * (s - h.lambda_margin));
        pos_idx.push_back(k);
      } else {
        neg_exp.push_back(h.beta * (s - h.lambda_margin));
        neg_idx.push_back(k);
      }
    }
    const SoftplusSum pos = log1p_sum_exp(pos_exp);
    const SoftplusSum neg = log1p_sum_exp(neg_exp);
    out.value += inv_b * (pos.value / h.alpha + neg.value / h.beta);
    // d/dS_ik of (1/alpha) ln(1 + sum exp(-alpha(S-m))) = -exp(a_k) / (1 + sum exp(a))
    for (std::size_t n = 0; n < pos_idx.size(); ++n) {
      out.grad[i * batch + pos_idx[n]] = -inv_b * std::exp(pos_exp[n] - pos.shift) / pos.denom;
    }
    for (std::size_t n = 0; n < neg_idx.size(); ++n) {
      out.grad[i * batch + neg_idx[n]] = inv_b * std::exp(neg_exp[n] - neg.shift) / neg.denom;
    }
  }
  return out;
}

LossValue weighted_ce(const Tensor& logits, std::span<const int> labels, const ClassWeights& w) {
  if (logits.rank() != 2) throw ShapeError("weighted_ce expects [B,C], got " + shape_to_string(logits.shape()));
  const std::size_t batch = logits.dim(0);
  const std::size_t classes = logits.dim(1);
  check_labels(labels, batch, classes, "weighted_ce");
  if (w.size() != classes) {
    throw ShapeError(fmt::format("weighted_ce: {} class weights for {} classes", w.size(), classes));
  }
  w.validate();
  if (!logits.all_finite()) throw NumericError("weighted_ce received a non-finite logit");

  LossValue out{0.0, Tensor(logits.shape(), 0.0)};
  if (batch == 0) return out;
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const double* l = logits.data().data() + i * classes;
    const double m = *std::max_element(l, l + classes);
    double z = 0.0;
    for (std::size_t c = 0; c < classes; ++c) z += std::exp(l[c] - m);
    const double lse = m + std::log(z);
    const auto y = static_cast<std::size_t>(labels[i]);
    const double wy = w.w[y];
    out.value += inv_b * wy * (lse - l[y]);
    for (std::size_t c = 0; c < classes; ++c) {
      const double p = std::exp(l[c] - lse);
      out.grad[i * classes + c] = inv_b * wy * (p - (c == y ? 1.0 : 0.0));
    }
  }
  return out;
}

double total_loss(double l_car, double l_ia, double lambda_mix) {
  if (!(lambda_mix >= 0.0 && lambda_mix <= 1.0)) {
    throw ConfigError(fmt::format("lambda_mix must lie in [0, 1], got {}", lambda_mix));
  }
  return lambda_mix * l_car + (1.0 - lambda_mix) * l_ia;
}

}  // namespace dsts
