#include <algorithm>
#include <fmt/format.h>

#include "dsts/error.hpp"
#include "dsts/layers.hpp"
#include "dsts/simd/kernels.hpp"

namespace dsts {

void ConvParams::validate() const {
  if (weight.rank() != 3) {
    throw ShapeError("conv weight must be [C_out, C_in, k], got " + shape_to_string(weight.shape()));
  }
  if (out_channels() == 0 || in_channels() == 0) {
    throw ConfigError("conv channels must be positive, got weight " + shape_to_string(weight.shape()));
  }
  if (kernel() % 2 == 0) {
    throw ConfigError(fmt::format("conv kernel size must be odd, got {}", kernel()));
  }
  if (bias.shape() != Shape{out_channels()}) {
    throw ShapeError(fmt::format("conv bias shape {} does not match {} output channels",
                                 shape_to_string(bias.shape()), out_channels()));
  }
}

namespace {

struct ConvDims {
  std::size_t batch, c_in, c_out, time, k, pad;
};

ConvDims check_conv(const Tensor& x, const ConvParams& p) {
  p.validate();
  if (x.rank() != 3 || x.dim(1) != p.in_channels()) {
    throw ShapeError(fmt::format("conv1d input {} incompatible with weight {}", shape_to_string(x.shape()),
                                 shape_to_string(p.weight.shape())));
  }
  return {x.dim(0), p.in_channels(), p.out_channels(), x.dim(2), p.kernel(), (p.kernel() - 1) / 2};
}

// Output positions t in [lo, hi) read input position t + shift, which stays inside [0, T).
struct Window {
  std::size_t lo, hi;
  std::ptrdiff_t shift;
};

Window tap_window(std::size_t j, std::size_t pad, std::size_t time) {
  const auto shift = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(pad);
  const auto t = static_cast<std::ptrdiff_t>(time);
  const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
  const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(t, t - shift);
  if (hi <= lo) return {0, 0, shift};
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi), shift};
}

}  // namespace

Tensor conv1d(const Tensor& x, const ConvParams& p) {
  const ConvDims d = check_conv(x, p);
  Tensor y(Shape{d.batch, d.c_out, d.time}, 0.0);
  const auto& kern = simd::active();
  const double* xd = x.data().data();
  const double* wd = p.weight.data().data();
  double* yd = y.data().data();
  for (std::size_t b = 0; b < d.batch; ++b) {
    for (std::size_t o = 0; o < d.c_out; ++o) {
      double* yrow = yd + (b * d.c_out + o) * d.time;
      std::fill(yrow, yrow + d.time, p.bias[o]);
      for (std::size_t c = 0; c < d.c_in; ++c) {
        const double* xrow = xd + (b * d.c_in + c) * d.time;
        for (std::size_t j = 0; j < d.k; ++j) {
          const Window w = tap_window(j, d.pad, d.time);
          if (w.hi == w.lo) continue;
          kern.axpy(wd[(o * d.c_in + c) * d.k + j], xrow + w.lo + w.shift, yrow + w.lo, w.hi - w.lo);
        }
      }
    }
  }
  return y;
}

ConvGrads conv1d_backward(const Tensor& x, const ConvParams& p, const Tensor& dy) {
  const ConvDims d = check_conv(x, p);
  if (dy.shape() != Shape{d.batch, d.c_out, d.time}) {
    throw ShapeError("conv1d_backward upstream gradient has shape " + shape_to_string(dy.shape()));
  }
  ConvGrads g{Tensor(x.shape(), 0.0), Tensor(p.weight.shape(), 0.0), Tensor(p.bias.shape(), 0.0)};
  const auto& kern = simd::active();
  const double* xd = x.data().data();
  const double* wd = p.weight.data().data();
  const double* dyd = dy.data().data();
  double* dxd = g.dx.data().data();
  double* dwd = g.dweight.data().data();
  for (std::size_t b = 0; b < d.batch; ++b) {
    for (std::size_t o = 0; o < d.c_out; ++o) {
      const double* dyrow = dyd + (b * d.c_out + o) * d.time;
      g.dbias[o] += kern.sum(dyrow, d.time);
      for (std::size_t c = 0; c < d.c_in; ++c) {
        const double* xrow = xd + (b * d.c_in + c) * d.time;
        double* dxrow = dxd + (b * d.c_in + c) * d.time;
        for (std::size_t j = 0; j < d.k; ++j) {
          const Window w = tap_window(j, d.pad, d.time);
          if (w.hi == w.lo) continue;
          const std::size_t widx = (o * d.c_in + c) * d.k + j;
          dwd[widx] += kern.dot(dyrow + w.lo, xrow + w.lo + w.shift, w.hi - w.lo);
          kern.axpy(wd[widx], dyrow + w.lo, dxrow + w.lo + w.shift, w.hi - w.lo);
        }
      }
    }
  }
  return g;
}

}  // namespace dsts
