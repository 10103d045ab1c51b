#pragma once

#include "lbinv/prox.hpp"
#include "lbinv/tensor.hpp"

namespace lbinv {

/// Lifted Bregman loss
///
///   B(x, z) = 1/2 |x|^2 + Psi(x) + (1/2 |.|^2 + Psi)^*(z) - <x, z>,
///
/// which couples a post-activation x to a pre-activation z. It is convex in
/// each argument, differentiable in z with gradient sigma(z) - x, bounded
/// below by 1/2 |sigma(z) - x|^2 and zero exactly when x = sigma(z).
class BregmanLoss {
 public:
  explicit BregmanLoss(ProxPenalty penalty) : penalty_(penalty) {}

  const ProxPenalty& penalty() const noexcept { return penalty_; }

  /// +inf iff Psi(x) = +inf.
  double loss(const Tensor& x, const Tensor& z) const;
  Tensor grad_z(const Tensor& x, const Tensor& z) const;

 private:
  ProxPenalty penalty_;
};

/// J(x, y) = 1/2 (Psi(x) + Psi(y) - 2 Psi((x + y) / 2)); +inf if either side is infeasible.
double burbea_rao(const ProxPenalty& penalty, const Tensor& x, const Tensor& y);

/// <x - y, q_x - q_y> for subgradients q_x of R at x and q_y at y.
/// Throws SubgradientError when the result is below -1e-10.
double symmetric_bregman(const Tensor& subgrad_x, const Tensor& subgrad_y, const Tensor& x,
                         const Tensor& y);

/// Right-hand side of the perceptron error estimate
///   (1 + c) delta^2 + alpha^2 / c |v|^2 + 2 c J(y + (alpha/c) v, y - (alpha/c) v)
/// for c in (0, 1], alpha > 0, delta >= 0.
double error_bound_rhs(const ProxPenalty& penalty, double delta, double alpha, double c,
                       const Tensor& source_element, const Tensor& y_delta);

/// alpha(delta) = sqrt(c (1 + c)) delta / |v|.
double alpha_schedule(double delta, double c, double source_norm);

}  // namespace lbinv
