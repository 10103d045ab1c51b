#pragma once

#include <cstddef>
#include <cstdint>

#include "lbinv/tensor.hpp"

namespace lbinv {

enum class OperatorKind : std::uint8_t {
  DenseAffine = 0,
  Conv2d = 1,
  ConvTranspose2d = 2,
};

const char* to_string(OperatorKind kind);

/// Affine map x -> A x + b with a matching adjoint u -> A^T u.
///
/// Layouts:
///   DenseAffine      weight [m, n], bias [m]; input is any tensor with n entries.
///   Conv2d           kernel [out_c, in_c, kh, kw], bias [out_c]; input [in_c, H, W].
///   ConvTranspose2d  kernel [in_c, out_c, kh, kw], bias [out_c]; input [in_c, H, W].
///
/// Convolutions use symmetric zero padding. Conv2d output size per axis is
/// floor((n + 2p - k) / s) + 1; ConvTranspose2d inverts it as (n - 1) s - 2p + k.
class LinearOperator {
 public:
  static LinearOperator dense(Tensor weight, Tensor bias);
  static LinearOperator conv2d(Tensor kernel, Tensor bias, std::size_t stride,
                               std::size_t padding, std::size_t in_height,
                               std::size_t in_width);
  static LinearOperator conv_transpose2d(Tensor kernel, Tensor bias, std::size_t stride,
                                         std::size_t padding, std::size_t in_height,
                                         std::size_t in_width);

  /// Padding that halves the spatial size for even kernels (4x4 stride 2 -> 1).
  static std::size_t default_padding(std::size_t kernel, std::size_t stride);

  OperatorKind kind() const noexcept { return kind_; }
  const Shape& input_shape() const noexcept { return input_shape_; }
  const Shape& output_shape() const noexcept { return output_shape_; }
  std::size_t input_size() const { return numel(input_shape_); }
  std::size_t output_size() const { return numel(output_shape_); }

  const Tensor& weight() const noexcept { return weight_; }
  const Tensor& bias() const noexcept { return bias_; }
  std::size_t stride() const noexcept { return stride_; }
  std::size_t padding() const noexcept { return padding_; }

  /// A x + b, shaped as output_shape().
  Tensor forward(const Tensor& x) const;
  /// A x (bias dropped).
  Tensor apply_linear(const Tensor& x) const;
  /// A^T u, shaped as input_shape().
  Tensor adjoint_apply(const Tensor& u) const;

  /// dW += d<u, A x>/dW and db += sum of u over the bias broadcast.
  void accumulate_parameter_gradients(const Tensor& x, const Tensor& upstream,
                                      Tensor& weight_grad, Tensor& bias_grad) const;

  /// weight -= lr * weight_grad; bias -= lr * bias_grad.
  void gradient_step(const Tensor& weight_grad, const Tensor& bias_grad, double lr);

 private:
  LinearOperator() = default;

  void check_input(const Tensor& x) const;
  void check_output(const Tensor& u) const;

  OperatorKind kind_ = OperatorKind::DenseAffine;
  Tensor weight_;
  Tensor bias_;
  std::size_t stride_ = 1;
  std::size_t padding_ = 0;
  Shape input_shape_;
  Shape output_shape_;
};

/// Power-iteration estimate of ||A||_2^2 (largest eigenvalue of A^T A).
///
/// Starts from a seeded random unit vector; the Rayleigh quotient is
/// non-decreasing in the iteration count. Returns 0 for the zero operator.
double operator_norm_sq(const LinearOperator& op, int iters = 100, std::uint64_t seed = 0);

}  // namespace lbinv
