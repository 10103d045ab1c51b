#include "lbinv/tv.hpp"

#include <cmath>

#include "lbinv/errors.hpp"

namespace lbinv {

namespace {

void require_image(const Tensor& image) {
  if (image.rank() != 2) {
    throw DimensionError("expected a 2-D image, got " + to_string(image.shape()));
  }
}

}  // namespace

DualField grad_image(const Tensor& image) {
  require_image(image);
  const std::size_t h = image.dim(0);
  const std::size_t w = image.dim(1);
  DualField g = DualField::zeros(h, w);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const double x = image.at(i, j);
      if (i + 1 < h) g.data.at(i, j, 0) = image.at(i + 1, j) - x;
      if (j + 1 < w) g.data.at(i, j, 1) = image.at(i, j + 1) - x;
    }
  }
  return g;
}

Tensor div_field(const DualField& field) {
  if (field.data.rank() != 3 || field.data.dim(2) != 2) {
    throw DimensionError("dual field must be H x W x 2, got " + to_string(field.data.shape()));
  }
  const std::size_t h = field.height();
  const std::size_t w = field.width();
  Tensor d({h, w});
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      double v = 0.0;
      if (i + 1 < h) v += field.data.at(i, j, 0);
      if (i > 0) v -= field.data.at(i - 1, j, 0);
      if (j + 1 < w) v += field.data.at(i, j, 1);
      if (j > 0) v -= field.data.at(i, j - 1, 1);
      d.at(i, j) = v;
    }
  }
  return d;
}

double tv_norm(const Tensor& image) {
  const DualField g = grad_image(image);
  double acc = 0.0;
  const std::size_t pixels = g.height() * g.width();
  for (std::size_t p = 0; p < pixels; ++p) {
    acc += std::hypot(g.data[2 * p], g.data[2 * p + 1]);
  }
  return acc;
}

DualField project_dual_ball(DualField field) {
  const std::size_t pixels = field.data.size() / 2;
  for (std::size_t p = 0; p < pixels; ++p) {
    const double n = std::hypot(field.data[2 * p], field.data[2 * p + 1]);
    if (n > 1.0) {
      field.data[2 * p] /= n;
      field.data[2 * p + 1] /= n;
    }
  }
  return field;
}

}  // namespace lbinv
