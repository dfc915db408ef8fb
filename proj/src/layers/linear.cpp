#include <fmt/format.h>

#include "dsts/error.hpp"
#include "dsts/layers.hpp"
#include "dsts/simd/kernels.hpp"

namespace dsts {

namespace {
void check_linear(const Tensor& e, const LinearParams& p) {
  if (p.weight.rank() != 2 || p.bias.shape() != Shape{p.weight.dim(0)}) {
    throw ShapeError(fmt::format("linear parameters inconsistent: weight {}, bias {}",
                                 shape_to_string(p.weight.shape()), shape_to_string(p.bias.shape())));
  }
  if (e.rank() != 2 || e.dim(1) != p.weight.dim(1)) {
    throw ShapeError(fmt::format("linear input {} incompatible with weight {}", shape_to_string(e.shape()),
                                 shape_to_string(p.weight.shape())));
  }
}
}  // namespace

Tensor linear(const Tensor& e, const LinearParams& p) {
  check_linear(e, p);
  const std::size_t batch = e.dim(0);
  const std::size_t emb = e.dim(1);
  const std::size_t classes = p.weight.dim(0);
  const auto& kern = simd::active();
  Tensor logits(Shape{batch, classes}, 0.0);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < classes; ++o) {
      logits[b * classes + o] =
          p.bias[o] + kern.dot(p.weight.data().data() + o * emb, e.data().data() + b * emb, emb);
    }
  }
  return logits;
}

LinearGrads linear_backward(const Tensor& e, const LinearParams& p, const Tensor& dlogits) {
  check_linear(e, p);
  const std::size_t batch = e.dim(0);
  const std::size_t emb = e.dim(1);
  const std::size_t classes = p.weight.dim(0);
  if (dlogits.shape() != Shape{batch, classes}) {
    throw ShapeError("linear_backward upstream gradient has shape " + shape_to_string(dlogits.shape()));
  }
  const auto& kern = simd::active();
  LinearGrads g{Tensor(e.shape(), 0.0), Tensor(p.weight.shape(), 0.0), Tensor(p.bias.shape(), 0.0)};
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < classes; ++o) {
      const double gl = dlogits[b * classes + o];
      g.dbias[o] += gl;
      kern.axpy(gl, e.data().data() + b * emb, g.dweight.data().data() + o * emb, emb);
      kern.axpy(gl, p.weight.data().data() + o * emb, g.de.data().data() + b * emb, emb);
    }
  }
  return g;
}

}  // namespace dsts
