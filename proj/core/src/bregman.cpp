#include "lbinv/bregman.hpp"

#include <cmath>

#include "lbinv/errors.hpp"

namespace lbinv {

double BregmanLoss::loss(const Tensor& x, const Tensor& z) const {
  require_same_size(x, z, "BregmanLoss::loss");
  // Per component: 1/2 (x - s)^2 + [Psi(x) - Psi(s) - (z - s)(x - s)] with s = sigma(z).
  // Algebraically identical to the conjugate form; the bracket is a Bregman
  // distance of Psi (z - s is a subgradient at s), so each term is >= 0 and
  // the sum does not suffer from cancellation near x = sigma(z).
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double psi_x = penalty_.eval_scalar(x[i]);
    if (psi_x == kInfinity) return kInfinity;
    const double s = penalty_.prox_scalar(z[i]);
    const double d = x[i] - s;
    const double gap = psi_x - penalty_.eval_scalar(s) - (z[i] - s) * d;
    acc += 0.5 * d * d + (gap > 0.0 ? gap : 0.0);
  }
  return acc;
}

Tensor BregmanLoss::grad_z(const Tensor& x, const Tensor& z) const {
  require_same_size(x, z, "BregmanLoss::grad_z");
  Tensor g = penalty_.prox(z);
  g -= x;
  return g;
}

double burbea_rao(const ProxPenalty& penalty, const Tensor& x, const Tensor& y) {
  require_same_size(x, y, "burbea_rao");
  const double fx = penalty.eval(x);
  const double fy = penalty.eval(y);
  if (fx == kInfinity || fy == kInfinity) return kInfinity;
  Tensor mid = x + y;
  mid *= 0.5;
  const double value = 0.5 * (fx + fy - 2.0 * penalty.eval(mid));
  return value > 0.0 ? value : 0.0;
}

double symmetric_bregman(const Tensor& subgrad_x, const Tensor& subgrad_y, const Tensor& x,
                         const Tensor& y) {
  require_same_size(x, y, "symmetric_bregman");
  require_same_size(subgrad_x, x, "symmetric_bregman");
  require_same_size(subgrad_y, y, "symmetric_bregman");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (subgrad_x[i] - subgrad_y[i]);
  if (acc < -1e-10) {
    throw SubgradientError("symmetric_bregman: negative value " + std::to_string(acc) +
                           "; supplied vectors are not subgradients");
  }
  return acc;
}

double error_bound_rhs(const ProxPenalty& penalty, double delta, double alpha, double c,
                       const Tensor& source_element, const Tensor& y_delta) {
  if (!(c > 0.0 && c <= 1.0)) throw ParameterError("error_bound_rhs: c must lie in (0, 1]");
  if (!(alpha > 0.0)) throw ParameterError("error_bound_rhs: alpha must be positive");
  if (!(delta >= 0.0)) throw ParameterError("error_bound_rhs: delta must be non-negative");
  require_same_size(source_element, y_delta, "error_bound_rhs");

  const double shift = alpha / c;
  Tensor plus = y_delta;
  Tensor minus = y_delta;
  axpy(shift, source_element, plus);
  axpy(-shift, source_element, minus);
  const double jensen = burbea_rao(penalty, plus, minus);
  if (jensen == kInfinity) return kInfinity;
  return (1.0 + c) * delta * delta + alpha * alpha / c * squared_norm(source_element) +
         2.0 * c * jensen;
}

double alpha_schedule(double delta, double c, double source_norm) {
  if (!(c > 0.0 && c <= 1.0)) throw ParameterError("alpha_schedule: c must lie in (0, 1]");
  if (!(source_norm > 0.0)) throw ParameterError("alpha_schedule: source norm must be positive");
  if (!(delta >= 0.0)) throw ParameterError("alpha_schedule: delta must be non-negative");
  return std::sqrt(c * (1.0 + c)) * delta / source_norm;
}

}  // namespace lbinv
