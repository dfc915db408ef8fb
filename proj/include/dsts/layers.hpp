#pragma once

// Forward and backward passes for the layers of the convolutional embedding
// network. Every forward function is pure; the matching *_backward function
// takes the upstream gradient and returns gradients for the input and for
// each learnable parameter.
//
// Layout conventions: sequences are [B, C, T] (batch, channel, time),
// embeddings and logits are [B, C].

#include <cstddef>
#include <vector>

#include "dsts/tensor.hpp"

namespace dsts {

enum class Mode { Train, Eval };

// ---------------------------------------------------------------------------
// 1-D convolution (cross-correlation, stride 1, "same" zero padding)
// ---------------------------------------------------------------------------

struct ConvParams {
  Tensor weight;  // [C_out, C_in, k]
  Tensor bias;    // [C_out]

  std::size_t out_channels() const { return weight.dim(0); }
  std::size_t in_channels() const { return weight.dim(1); }
  std::size_t kernel() const { return weight.dim(2); }
  /// Throws ConfigError for an even or zero kernel / zero channels, ShapeError for a bias mismatch.
  void validate() const;
};

struct ConvGrads {
  Tensor dx;
  Tensor dweight;
  Tensor dbias;
};

/// y[b,o,t] = bias[o] + sum_{c,j} weight[o,c,j] * x[b,c,t+j-(k-1)/2], zero outside [0,T).
Tensor conv1d(const Tensor& x, const ConvParams& p);
ConvGrads conv1d_backward(const Tensor& x, const ConvParams& p, const Tensor& dy);

// ---------------------------------------------------------------------------
// Batch normalization over the batch and time axes
// ---------------------------------------------------------------------------

struct BatchNormParams {
  Tensor gamma;         // [C]
  Tensor beta;          // [C]
  Tensor running_mean;  // [C]
  Tensor running_var;   // [C]
  double momentum = 0.1;
  double epsilon = 1e-5;

  /// gamma = 1, beta = 0, running mean 0, running variance 1.
  static BatchNormParams identity(std::size_t channels, double momentum = 0.1, double epsilon = 1e-5);
  std::size_t channels() const { return gamma.size(); }
};

struct BatchNormOutput {
  Mode mode = Mode::Eval;
  Tensor y;
  Tensor xhat;     // normalized input, [B,C,T]
  Tensor inv_std;  // 1/sqrt(var + eps) per channel
  // Running statistics after this call. Equal to the inputs in Eval mode.
  Tensor running_mean;
  Tensor running_var;
};

struct BatchNormGrads {
  Tensor dx;
  Tensor dgamma;
  Tensor dbeta;
};

/// Train mode normalizes with the batch statistics (biased variance) and
/// returns updated running statistics; Eval mode uses the running statistics.
BatchNormOutput batchnorm1d(const Tensor& x, const BatchNormParams& p, Mode mode);
BatchNormGrads batchnorm1d_backward(const BatchNormOutput& fwd, const BatchNormParams& p, const Tensor& dy);

// ---------------------------------------------------------------------------
// Elementwise and pooling layers
// ---------------------------------------------------------------------------

Tensor relu(const Tensor& x);
/// Gradient passes where x > 0; the subgradient at exactly 0 is 0.
Tensor relu_backward(const Tensor& x, const Tensor& dy);

struct MaxPoolOutput {
  Tensor e;                          // [B,C]
  std::vector<std::size_t> argmax;  // earliest maximal time index per (b,c)
  std::size_t time_len = 0;
};

MaxPoolOutput global_maxpool_time(const Tensor& z);
Tensor global_maxpool_time_backward(const MaxPoolOutput& fwd, const Tensor& de);

// ---------------------------------------------------------------------------
// Linear head and softmax
// ---------------------------------------------------------------------------

struct LinearParams {
  Tensor weight;  // [C_classes, C_emb]
  Tensor bias;    // [C_classes]
};

struct LinearGrads {
  Tensor de;
  Tensor dweight;
  Tensor dbias;
};

/// logits = e * weight^T + bias
Tensor linear(const Tensor& e, const LinearParams& p);
LinearGrads linear_backward(const Tensor& e, const LinearParams& p, const Tensor& dlogits);

/// Row-wise softmax with max subtraction. Throws NumericError on non-finite input.
Tensor softmax(const Tensor& logits);
/// Vector-Jacobian product of the row-wise softmax.
Tensor softmax_backward(const Tensor& probs, const Tensor& dprobs);

}  // namespace dsts
