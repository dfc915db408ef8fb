#include <algorithm>
#include <cmath>

#include "dsts/error.hpp"
#include "dsts/layers.hpp"

namespace dsts {

Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& dy) {
  if (x.shape() != dy.shape()) throw ShapeError("relu_backward shape mismatch");
  Tensor dx(x.shape(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
  return dx;
}

MaxPoolOutput global_maxpool_time(const Tensor& z) {
  if (z.rank() != 3) throw ShapeError("global_maxpool_time expects [B,C,T], got " + shape_to_string(z.shape()));
  const std::size_t batch = z.dim(0);
  const std::size_t ch = z.dim(1);
  const std::size_t time = z.dim(2);
  if (time == 0) throw DegenerateInputError("global_maxpool_time over an empty time axis");

  MaxPoolOutput out{Tensor(Shape{batch, ch}, 0.0), std::vector<std::size_t>(batch * ch, 0), time};
  for (std::size_t row = 0; row < batch * ch; ++row) {
    const double* zr = z.data().data() + row * time;
    // max_element returns the first maximum, which fixes the tie-break.
    const double* best = std::max_element(zr, zr + time);
    out.e[row] = *best;
    out.argmax[row] = static_cast<std::size_t>(best - zr);
  }
  return out;
}

Tensor global_maxpool_time_backward(const MaxPoolOutput& fwd, const Tensor& de) {
  if (de.shape() != fwd.e.shape()) throw ShapeError("global_maxpool_time_backward shape mismatch");
  Tensor dz(Shape{fwd.e.dim(0), fwd.e.dim(1), fwd.time_len}, 0.0);
  for (std::size_t row = 0; row < fwd.argmax.size(); ++row) {
    dz[row * fwd.time_len + fwd.argmax[row]] = de[row];
  }
  return dz;
}

Tensor softmax(const Tensor& logits) {
  if (logits.rank() != 2) throw ShapeError("softmax expects [B,C], got " + shape_to_string(logits.shape()));
  if (!logits.all_finite()) throw NumericError("softmax received a non-finite logit");
  const std::size_t rows = logits.dim(0);
  const std::size_t cols = logits.dim(1);
  Tensor p(logits.shape(), 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* l = logits.data().data() + r * cols;
    double* out = p.data().data() + r * cols;
    const double m = *std::max_element(l, l + cols);
    double z = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      out[c] = std::exp(l[c] - m);
      z += out[c];
    }
    for (std::size_t c = 0; c < cols; ++c) out[c] /= z;
  }
  return p;
}

Tensor softmax_backward(const Tensor& probs, const Tensor& dprobs) {
  if (probs.shape() != dprobs.shape() || probs.rank() != 2) throw ShapeError("softmax_backward shape mismatch");
  const std::size_t rows = probs.dim(0);
  const std::size_t cols = probs.dim(1);
  Tensor dl(probs.shape(), 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += probs[r * cols + c] * dprobs[r * cols + c];
    for (std::size_t c = 0; c < cols; ++c) {
      dl[r * cols + c] = probs[r * cols + c] * (dprobs[r * cols + c] - s);
    }
  }
  return dl;
}

}  // namespace dsts
