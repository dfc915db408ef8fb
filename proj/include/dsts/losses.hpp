#pragma once

// Training objectives: the multi-similarity loss over in-batch cosine
// similarities, inverse-frequency weighted cross-entropy, and their convex mix.

#include <span>
#include <vector>

#include "dsts/tensor.hpp"

namespace dsts {

using Labels = std::vector<int>;

/// Multi-similarity loss hyperparameters. `lambda_margin` is the similarity
/// margin inside the loss, unrelated to the mixing weight of total_loss.
struct MsHyper {
  double alpha = 2.0;
  double beta = 50.0;
  double lambda_margin = 0.5;

  void validate() const;
};

struct ClassWeights {
  std::vector<double> w;

  static ClassWeights ones(std::size_t classes) { return {std::vector<double>(classes, 1.0)}; }
  std::size_t size() const noexcept { return w.size(); }
  void validate() const;
};

struct LossValue {
  double value = 0.0;
  Tensor grad;  // gradient with respect to the loss's direct input
};

/// S[i,k] = <e_i, e_k> / (max(|e_i|, 1e-12) * max(|e_k|, 1e-12)).
Tensor cosine_similarity_matrix(const Tensor& embeddings);
/// Gradient of sum(dS .* S) with respect to the embeddings.
Tensor cosine_similarity_backward(const Tensor& embeddings, const Tensor& dS);

/// (1/B) sum_i [ (1/alpha) ln(1 + sum_{k in P_i} exp(-alpha (S_ik - m)))
///             + (1/beta)  ln(1 + sum_{k in N_i} exp( beta (S_ik - m))) ]
///
/// P_i holds the other same-label indices (i itself excluded), N_i the
/// different-label ones. The gradient treats every entry of S as independent.
LossValue ms_loss(const Tensor& S, std::span<const int> labels, const MsHyper& h);

/// (1/B) sum_i w[y_i] * (-ln softmax(logits_i)[y_i]); gradient with respect to the logits.
LossValue weighted_ce(const Tensor& logits, std::span<const int> labels, const ClassWeights& w);

/// lambda_mix * l_car + (1 - lambda_mix) * l_ia; throws ConfigError outside [0, 1].
double total_loss(double l_car, double l_ia, double lambda_mix);

}  // namespace dsts
