#pragma once
// Independent reference computations used as test oracles. Nothing here calls
// the library's own solvers.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <functional>

#include "lbinv/linear_operator.hpp"
#include "lbinv/rng.hpp"
#include "lbinv/tensor.hpp"

namespace oracle {

using lbinv::Shape;
using lbinv::Tensor;

inline Tensor random_tensor(const Shape& shape, lbinv::Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(shape);
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

inline Eigen::VectorXd to_eigen(const Tensor& t) {
  return Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
}

inline Tensor from_eigen(const Eigen::VectorXd& v, const Shape& shape) {
  return Tensor(shape, std::vector<double>(v.data(), v.data() + v.size()));
}

// Column j is the response of the bias-free map to the j-th unit vector.
inline Eigen::MatrixXd materialize(const lbinv::LinearOperator& op) {
  const std::size_t n = op.input_size();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(op.output_size()), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    Tensor e(op.input_shape());
    e[j] = 1.0;
    a.col(static_cast<Eigen::Index>(j)) = to_eigen(op.apply_linear(e));
  }
  return a;
}

// Direct 2-D cross-correlation with zero padding, written from the textbook
// definition: out[o, i, j] = b[o] + sum_{c, a, b} K[o, c, a, b] x[c, i s + a - p, j s + b - p].
inline Tensor naive_conv2d(const Tensor& x, const Tensor& k, const Tensor& bias, std::size_t s,
                           std::size_t p) {
  const std::size_t oc = k.dim(0), ic = k.dim(1), kh = k.dim(2), kw = k.dim(3);
  const std::size_t h = x.dim(1), w = x.dim(2);
  const std::size_t oh = (h + 2 * p - kh) / s + 1, ow = (w + 2 * p - kw) / s + 1;
  Tensor out({oc, oh, ow});
  for (std::size_t o = 0; o < oc; ++o)
    for (std::size_t i = 0; i < oh; ++i)
      for (std::size_t j = 0; j < ow; ++j) {
        double acc = bias[o];
        for (std::size_t c = 0; c < ic; ++c)
          for (std::size_t a = 0; a < kh; ++a)
            for (std::size_t b = 0; b < kw; ++b) {
              const long r = static_cast<long>(i * s + a) - static_cast<long>(p);
              const long q = static_cast<long>(j * s + b) - static_cast<long>(p);
              if (r < 0 || q < 0 || r >= static_cast<long>(h) || q >= static_cast<long>(w)) continue;
              acc += k[((o * ic + c) * kh + a) * kw + b] * x[(c * h + r) * w + q];
            }
        out[(o * oh + i) * ow + j] = acc;
      }
  return out;
}

inline double grid_min_1d(const std::function<double(double)>& f, double lo, double hi, double step,
                          double* argmin = nullptr) {
  double best = INFINITY, best_x = lo;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 0.5));
  for (long i = 0; i <= n; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  if (argmin) *argmin = best_x;
  return best;
}

inline double central_difference(const std::function<double(const Tensor&)>& f, const Tensor& x,
                                  std::size_t i, double h) {
  Tensor xp = x, xm = x;
  xp[i] += h;
  xm[i] -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace oracle
