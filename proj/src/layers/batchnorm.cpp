#include <cmath>
#include <fmt/format.h>

#include "dsts/error.hpp"
#include "dsts/layers.hpp"
#include "dsts/simd/kernels.hpp"

namespace dsts {

BatchNormParams BatchNormParams::identity(std::size_t channels, double momentum, double epsilon) {
  return BatchNormParams{Tensor(Shape{channels}, 1.0), Tensor(Shape{channels}, 0.0),
                         Tensor(Shape{channels}, 0.0), Tensor(Shape{channels}, 1.0), momentum, epsilon};
}

namespace {

void check_bn(const Tensor& x, const BatchNormParams& p) {
  if (x.rank() != 3) throw ShapeError("batchnorm1d expects [B,C,T], got " + shape_to_string(x.shape()));
  const Shape c{x.dim(1)};
  if (p.gamma.shape() != c || p.beta.shape() != c || p.running_mean.shape() != c ||
      p.running_var.shape() != c) {
    throw ShapeError(fmt::format("batchnorm1d parameters do not match {} channels", x.dim(1)));
  }
  if (!(p.epsilon > 0.0)) throw ConfigError("batchnorm epsilon must be positive");
  if (!(p.momentum > 0.0 && p.momentum <= 1.0)) throw ConfigError("batchnorm momentum must lie in (0, 1]");
}

}  // namespace

BatchNormOutput batchnorm1d(const Tensor& x, const BatchNormParams& p, Mode mode) {
  check_bn(x, p);
  const std::size_t batch = x.dim(0);
  const std::size_t ch = x.dim(1);
  const std::size_t time = x.dim(2);
  const std::size_t count = batch * time;
  if (mode == Mode::Train && count < 2) {
    throw DegenerateInputError(fmt::format("batchnorm1d in Train mode needs B*T >= 2 per channel, got {}", count));
  }
  const auto& kern = simd::active();

  BatchNormOutput out;
  out.mode = mode;
  out.y = Tensor(x.shape(), 0.0);
  out.xhat = Tensor(x.shape(), 0.0);
  out.inv_std = Tensor(Shape{ch}, 0.0);
  out.running_mean = p.running_mean;
  out.running_var = p.running_var;

  const double* xd = x.data().data();
  for (std::size_t c = 0; c < ch; ++c) {
    double mean = 0.0;
    double var = 0.0;
    if (mode == Mode::Train) {
      for (std::size_t b = 0; b < batch; ++b) mean += kern.sum(xd + (b * ch + c) * time, time);
      mean /= static_cast<double>(count);
      for (std::size_t b = 0; b < batch; ++b) var += kern.sum_sq_dev(xd + (b * ch + c) * time, mean, time);
      var /= static_cast<double>(count);
      out.running_mean[c] = (1.0 - p.momentum) * p.running_mean[c] + p.momentum * mean;
      out.running_var[c] = (1.0 - p.momentum) * p.running_var[c] + p.momentum * var;
    } else {
      mean = p.running_mean[c];
      var = p.running_var[c];
    }
    const double inv_std = 1.0 / std::sqrt(var + p.epsilon);
    out.inv_std[c] = inv_std;
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t off = (b * ch + c) * time;
      kern.affine(xd + off, inv_std, -mean * inv_std, out.xhat.data().data() + off, time);
      kern.affine(out.xhat.data().data() + off, p.gamma[c], p.beta[c], out.y.data().data() + off, time);
    }
  }
  return out;
}

BatchNormGrads batchnorm1d_backward(const BatchNormOutput& fwd, const BatchNormParams& p, const Tensor& dy) {
  if (dy.shape() != fwd.xhat.shape()) {
    throw ShapeError("batchnorm1d_backward upstream gradient has shape " + shape_to_string(dy.shape()));
  }
  const std::size_t batch = dy.dim(0);
  const std::size_t ch = dy.dim(1);
  const std::size_t time = dy.dim(2);
  const double n = static_cast<double>(batch * time);
  const auto& kern = simd::active();

  BatchNormGrads g{Tensor(dy.shape(), 0.0), Tensor(Shape{ch}, 0.0), Tensor(Shape{ch}, 0.0)};
  const double* dyd = dy.data().data();
  const double* xh = fwd.xhat.data().data();
  double* dxd = g.dx.data().data();
  for (std::size_t c = 0; c < ch; ++c) {
    double sum_dy = 0.0;
    double sum_dy_xhat = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t off = (b * ch + c) * time;
      sum_dy += kern.sum(dyd + off, time);
      sum_dy_xhat += kern.dot(dyd + off, xh + off, time);
    }
    g.dbeta[c] = sum_dy;
    g.dgamma[c] = sum_dy_xhat;
    const double scale = p.gamma[c] * fwd.inv_std[c];
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t off = (b * ch + c) * time;
      if (fwd.mode == Mode::Eval) {
        kern.affine(dyd + off, scale, 0.0, dxd + off, time);
        continue;
      }
      // dx = gamma * inv_std * (dy - mean(dy) - xhat * mean(dy * xhat))
      for (std::size_t t = 0; t < time; ++t) {
        dxd[off + t] = scale * (dyd[off + t] - sum_dy / n - xh[off + t] * (sum_dy_xhat / n));
      }
    }
  }
  return g;
}

}  // namespace dsts
