#pragma once

#include <cstddef>

#include "lbinv/tensor.hpp"

namespace lbinv {

/// Per-pixel 2-vector field, stored as an H x W x 2 tensor. Component 0 is the
/// vertical (row) difference, component 1 the horizontal (column) difference.
struct DualField {
  Tensor data;

  static DualField zeros(std::size_t height, std::size_t width) {
    return DualField{Tensor({height, width, 2})};
  }
  std::size_t height() const { return data.dim(0); }
  std::size_t width() const { return data.dim(1); }
};

/// Upper bound on |grad|^2 for the forward-difference gradient in 2-D.
inline constexpr double kGradientNormSqBound = 8.0;

/// Forward differences with zero last row (vertical) and last column (horizontal).
DualField grad_image(const Tensor& image);

/// div = -grad^T.
Tensor div_field(const DualField& field);

/// Isotropic total variation: sum over pixels of the Euclidean gradient norm.
double tv_norm(const Tensor& image);

/// Per pixel w / max(1, |w|_2).
DualField project_dual_ball(DualField field);

}  // namespace lbinv
