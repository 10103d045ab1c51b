#include "lbinv/linear_operator.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "lbinv/errors.hpp"
#include "lbinv/rng.hpp"

namespace lbinv {

namespace {

using RowMatrixMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using MutRowMatrixMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using VectorMap = Eigen::Map<const Eigen::VectorXd>;
using MutVectorMap = Eigen::Map<Eigen::VectorXd>;

RowMatrixMap as_matrix(const Tensor& w) {
  return RowMatrixMap(w.data(), static_cast<Eigen::Index>(w.dim(0)),
                      static_cast<Eigen::Index>(w.dim(1)));
}

VectorMap as_vector(const Tensor& t) {
  return VectorMap(t.data(), static_cast<Eigen::Index>(t.size()));
}

MutVectorMap as_vector(Tensor& t) {
  return MutVectorMap(t.data(), static_cast<Eigen::Index>(t.size()));
}

std::size_t conv_out(std::size_t n, std::size_t k, std::size_t s, std::size_t p) {
  if (n + 2 * p < k) throw DimensionError("convolution kernel larger than padded input");
  return (n + 2 * p - k) / s + 1;
}

// Geometry shared by Conv2d and its transpose. "Small" is the convolved side
// (conv output / transpose input), "large" is the other side.
struct ConvGeometry {
  std::size_t large_c, small_c, kh, kw, large_h, large_w, small_h, small_w, stride, pad;
};

// Output indices o in [lo, hi) whose input index o*s + k - p lands inside [0, n).
struct TapRange {
  std::size_t lo, hi;
};

TapRange tap_range(std::size_t k, std::size_t n, std::size_t small_n, std::size_t s,
                   std::size_t p) {
  const std::size_t lo = p > k ? (p - k + s - 1) / s : 0;
  if (n + p <= k) return {0, 0};
  const std::size_t hi = std::min(small_n, (n - 1 + p - k) / s + 1);
  return {lo, std::max(lo, hi)};
}

// Both layouts put the convolved-side channel first: conv [out][in], transpose [in][out].
const double* kernel_block(const ConvGeometry& g, const double* kernel, std::size_t oc,
                           std::size_t ic) {
  return kernel + (oc * g.large_c + ic) * g.kh * g.kw;
}

// small[oc, oh, ow] += sum K[oc, ic, ki, kj] * large[ic, oh*s + ki - p, ow*s + kj - p]
void correlate(const ConvGeometry& g, const double* kernel, const double* large,
               double* small) {
  for (std::size_t oc = 0; oc < g.small_c; ++oc) {
    double* out = small + oc * g.small_h * g.small_w;
    for (std::size_t ic = 0; ic < g.large_c; ++ic) {
      const double* k = kernel_block(g, kernel, oc, ic);
      const double* in = large + ic * g.large_h * g.large_w;
      for (std::size_t ki = 0; ki < g.kh; ++ki) {
        const TapRange rows = tap_range(ki, g.large_h, g.small_h, g.stride, g.pad);
        for (std::size_t kj = 0; kj < g.kw; ++kj) {
          const TapRange cols = tap_range(kj, g.large_w, g.small_w, g.stride, g.pad);
          const double w = k[ki * g.kw + kj];
          for (std::size_t oh = rows.lo; oh < rows.hi; ++oh) {
            const double* in_row = in + (oh * g.stride + ki - g.pad) * g.large_w;
            double* out_row = out + oh * g.small_w;
            for (std::size_t ow = cols.lo; ow < cols.hi; ++ow) {
              out_row[ow] += w * in_row[ow * g.stride + kj - g.pad];
            }
          }
        }
      }
    }
  }
}

// large[ic, oh*s + ki - p, ow*s + kj - p] += K[...] * small[oc, oh, ow]
void scatter(const ConvGeometry& g, const double* kernel, const double* small,
             double* large) {
  for (std::size_t oc = 0; oc < g.small_c; ++oc) {
    const double* in = small + oc * g.small_h * g.small_w;
    for (std::size_t ic = 0; ic < g.large_c; ++ic) {
      const double* k = kernel_block(g, kernel, oc, ic);
      double* out = large + ic * g.large_h * g.large_w;
      for (std::size_t ki = 0; ki < g.kh; ++ki) {
        const TapRange rows = tap_range(ki, g.large_h, g.small_h, g.stride, g.pad);
        for (std::size_t kj = 0; kj < g.kw; ++kj) {
          const TapRange cols = tap_range(kj, g.large_w, g.small_w, g.stride, g.pad);
          const double w = k[ki * g.kw + kj];
          for (std::size_t oh = rows.lo; oh < rows.hi; ++oh) {
            double* out_row = out + (oh * g.stride + ki - g.pad) * g.large_w;
            const double* in_row = in + oh * g.small_w;
            for (std::size_t ow = cols.lo; ow < cols.hi; ++ow) {
              out_row[ow * g.stride + kj - g.pad] += w * in_row[ow];
            }
          }
        }
      }
    }
  }
}

// dK[...] += small[oc, oh, ow] * large[ic, oh*s + ki - p, ow*s + kj - p]
void kernel_gradient(const ConvGeometry& g, const double* small, const double* large,
                     double* dkernel) {
  for (std::size_t oc = 0; oc < g.small_c; ++oc) {
    const double* up = small + oc * g.small_h * g.small_w;
    for (std::size_t ic = 0; ic < g.large_c; ++ic) {
      double* dk = const_cast<double*>(kernel_block(g, dkernel, oc, ic));
      const double* in = large + ic * g.large_h * g.large_w;
      for (std::size_t ki = 0; ki < g.kh; ++ki) {
        const TapRange rows = tap_range(ki, g.large_h, g.small_h, g.stride, g.pad);
        for (std::size_t kj = 0; kj < g.kw; ++kj) {
          const TapRange cols = tap_range(kj, g.large_w, g.small_w, g.stride, g.pad);
          double acc = 0.0;
          for (std::size_t oh = rows.lo; oh < rows.hi; ++oh) {
            const double* in_row = in + (oh * g.stride + ki - g.pad) * g.large_w;
            const double* up_row = up + oh * g.small_w;
            for (std::size_t ow = cols.lo; ow < cols.hi; ++ow) {
              acc += up_row[ow] * in_row[ow * g.stride + kj - g.pad];
            }
          }
          dk[ki * g.kw + kj] += acc;
        }
      }
    }
  }
}

ConvGeometry geometry(OperatorKind kind, const Tensor& kernel, const Shape& in,
                      const Shape& out, std::size_t stride, std::size_t pad) {
  ConvGeometry g{};
  g.kh = kernel.dim(2);
  g.kw = kernel.dim(3);
  g.stride = stride;
  g.pad = pad;
  if (kind == OperatorKind::Conv2d) {
    g.large_c = in[0], g.large_h = in[1], g.large_w = in[2];
    g.small_c = out[0], g.small_h = out[1], g.small_w = out[2];
  } else {
    g.small_c = in[0], g.small_h = in[1], g.small_w = in[2];
    g.large_c = out[0], g.large_h = out[1], g.large_w = out[2];
  }
  return g;
}

void add_channel_bias(const Tensor& bias, Tensor& out) {
  const std::size_t channels = bias.size();
  const std::size_t plane = out.size() / channels;
  for (std::size_t c = 0; c < channels; ++c) {
    double* p = out.data() + c * plane;
    for (std::size_t i = 0; i < plane; ++i) p[i] += bias[c];
  }
}

}  // namespace

const char* to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::DenseAffine: return "dense";
    case OperatorKind::Conv2d: return "conv2d";
    case OperatorKind::ConvTranspose2d: return "conv_transpose2d";
  }
  return "unknown";
}

LinearOperator LinearOperator::dense(Tensor weight, Tensor bias) {
  if (weight.rank() != 2) throw DimensionError("dense weight must be 2-D, got " + to_string(weight.shape()));
  if (bias.size() != weight.dim(0)) {
    throw DimensionError("dense bias has " + std::to_string(bias.size()) + " entries, expected " +
                         std::to_string(weight.dim(0)));
  }
  LinearOperator op;
  op.kind_ = OperatorKind::DenseAffine;
  op.input_shape_ = {weight.dim(1)};
  op.output_shape_ = {weight.dim(0)};
  op.bias_ = bias.reshaped({weight.dim(0)});
  op.weight_ = std::move(weight);
  return op;
}

std::size_t LinearOperator::default_padding(std::size_t kernel, std::size_t stride) {
  return kernel > stride ? (kernel - stride) / 2 : 0;
}

LinearOperator LinearOperator::conv2d(Tensor kernel, Tensor bias, std::size_t stride,
                                      std::size_t padding, std::size_t in_height,
                                      std::size_t in_width) {
  if (kernel.rank() != 4) throw DimensionError("conv kernel must be 4-D");
  if (stride == 0) throw ParameterError("conv stride must be positive");
  if (bias.size() != kernel.dim(0)) throw DimensionError("conv bias must have out_channels entries");
  LinearOperator op;
  op.kind_ = OperatorKind::Conv2d;
  op.stride_ = stride;
  op.padding_ = padding;
  op.input_shape_ = {kernel.dim(1), in_height, in_width};
  op.output_shape_ = {kernel.dim(0), conv_out(in_height, kernel.dim(2), stride, padding),
                      conv_out(in_width, kernel.dim(3), stride, padding)};
  op.bias_ = bias.reshaped({kernel.dim(0)});
  op.weight_ = std::move(kernel);
  return op;
}

LinearOperator LinearOperator::conv_transpose2d(Tensor kernel, Tensor bias, std::size_t stride,
                                                std::size_t padding, std::size_t in_height,
                                                std::size_t in_width) {
  if (kernel.rank() != 4) throw DimensionError("transpose-conv kernel must be 4-D");
  if (stride == 0) throw ParameterError("conv stride must be positive");
  if (bias.size() != kernel.dim(1)) throw DimensionError("transpose-conv bias must have out_channels entries");
  if (in_height == 0 || in_width == 0) throw DimensionError("empty transpose-conv input");
  const auto grow = [&](std::size_t n, std::size_t k) -> std::size_t {
    const std::size_t full = (n - 1) * stride + k;
    if (full <= 2 * padding) throw DimensionError("transpose-conv padding too large");
    return full - 2 * padding;
  };
  LinearOperator op;
  op.kind_ = OperatorKind::ConvTranspose2d;
  op.stride_ = stride;
  op.padding_ = padding;
  op.input_shape_ = {kernel.dim(0), in_height, in_width};
  op.output_shape_ = {kernel.dim(1), grow(in_height, kernel.dim(2)), grow(in_width, kernel.dim(3))};
  op.bias_ = bias.reshaped({kernel.dim(1)});
  op.weight_ = std::move(kernel);
  return op;
}

void LinearOperator::check_input(const Tensor& x) const {
  if (x.size() != input_size()) {
    throw DimensionError(std::string(lbinv::to_string(kind_)) + ": input " +
                         lbinv::to_string(x.shape()) + " does not match " +
                         lbinv::to_string(input_shape_));
  }
}

void LinearOperator::check_output(const Tensor& u) const {
  if (u.size() != output_size()) {
    throw DimensionError(std::string(lbinv::to_string(kind_)) + ": adjoint input " +
                         lbinv::to_string(u.shape()) + " does not match " +
                         lbinv::to_string(output_shape_));
  }
}

Tensor LinearOperator::apply_linear(const Tensor& x) const {
  check_input(x);
  Tensor out(output_shape_);
  switch (kind_) {
    case OperatorKind::DenseAffine:
      as_vector(out).noalias() = as_matrix(weight_) * as_vector(x);
      break;
    case OperatorKind::Conv2d:
      correlate(geometry(kind_, weight_, input_shape_, output_shape_, stride_, padding_),
                       weight_.data(), x.data(), out.data());
      break;
    case OperatorKind::ConvTranspose2d:
      scatter(geometry(kind_, weight_, input_shape_, output_shape_, stride_, padding_),
                    weight_.data(), x.data(), out.data());
      break;
  }
  return out;
}

Tensor LinearOperator::forward(const Tensor& x) const {
  Tensor out = apply_linear(x);
  if (kind_ == OperatorKind::DenseAffine) {
    out += bias_;
  } else {
    add_channel_bias(bias_, out);
  }
  return out;
}

Tensor LinearOperator::adjoint_apply(const Tensor& u) const {
  check_output(u);
  Tensor out(input_shape_);
  switch (kind_) {
    case OperatorKind::DenseAffine:
      as_vector(out).noalias() = as_matrix(weight_).transpose() * as_vector(u);
      break;
    case OperatorKind::Conv2d:
      scatter(geometry(kind_, weight_, input_shape_, output_shape_, stride_, padding_),
                     weight_.data(), u.data(), out.data());
      break;
    case OperatorKind::ConvTranspose2d:
      correlate(geometry(kind_, weight_, input_shape_, output_shape_, stride_, padding_),
                      weight_.data(), u.data(), out.data());
      break;
  }
  return out;
}

void LinearOperator::accumulate_parameter_gradients(const Tensor& x, const Tensor& upstream,
                                                    Tensor& weight_grad,
                                                    Tensor& bias_grad) const {
  check_input(x);
  check_output(upstream);
  require_same_size(weight_grad, weight_, "weight gradient");
  require_same_size(bias_grad, bias_, "bias gradient");
  switch (kind_) {
    case OperatorKind::DenseAffine: {
      MutRowMatrixMap dw(weight_grad.data(), static_cast<Eigen::Index>(weight_.dim(0)),
                         static_cast<Eigen::Index>(weight_.dim(1)));
      dw.noalias() += as_vector(upstream) * as_vector(x).transpose();
      as_vector(bias_grad) += as_vector(upstream);
      return;
    }
    case OperatorKind::Conv2d:
      kernel_gradient(geometry(kind_, weight_, input_shape_, output_shape_, stride_, padding_),
                             upstream.data(), x.data(), weight_grad.data());
      break;
    case OperatorKind::ConvTranspose2d:
      kernel_gradient(geometry(kind_, weight_, input_shape_, output_shape_, stride_, padding_),
                            x.data(), upstream.data(), weight_grad.data());
      break;
  }
  const std::size_t channels = bias_.size();
  const std::size_t plane = upstream.size() / channels;
  for (std::size_t c = 0; c < channels; ++c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < plane; ++i) acc += upstream[c * plane + i];
    bias_grad[c] += acc;
  }
}

void LinearOperator::gradient_step(const Tensor& weight_grad, const Tensor& bias_grad, double lr) {
  axpy(-lr, weight_grad, weight_);
  axpy(-lr, bias_grad, bias_);
}

double operator_norm_sq(const LinearOperator& op, int iters, std::uint64_t seed) {
  if (iters < 1) throw ParameterError("operator_norm_sq: iters must be >= 1");
  Rng rng(seed);
  Tensor v(op.input_shape());
  for (double& e : v.values()) e = rng.normal();
  v *= 1.0 / norm(v);
  double estimate = 0.0;
  for (int k = 0; k < iters; ++k) {
    const Tensor av = op.apply_linear(v);
    estimate = squared_norm(av);
    Tensor w = op.adjoint_apply(av);
    const double wn = norm(w);
    if (wn == 0.0) return estimate;
    v = (1.0 / wn) * std::move(w);
  }
  return squared_norm(op.apply_linear(v));
}

}  // namespace lbinv
