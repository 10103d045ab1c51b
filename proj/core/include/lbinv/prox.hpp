#pragma once

#include <cstdint>
#include <limits>

#include "lbinv/tensor.hpp"

namespace lbinv {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Tag values double as the activation byte in model archives.
enum class PenaltyKind : std::uint8_t {
  Zero = 0,             // sigma = identity
  NonNegIndicator = 1,  // sigma = ReLU
  BoxIndicator = 2,     // sigma = clip(., lo, hi)
  L1 = 3,               // sigma = soft-threshold(., lambda)
};

const char* to_string(PenaltyKind kind);

/// Convex, non-negative penalty Psi whose proximal map is a network activation.
///
/// Each kind provides three mutually consistent pieces: Psi itself, its prox
/// sigma, and the conjugate (1/2 |.|^2 + Psi)^*. Everything acts componentwise.
class ProxPenalty {
 public:
  static ProxPenalty zero() { return ProxPenalty(PenaltyKind::Zero, 0.0, 0.0, 0.0); }
  static ProxPenalty relu() { return ProxPenalty(PenaltyKind::NonNegIndicator, 0.0, 0.0, 0.0); }
  /// Requires lo <= 0 <= hi so that Psi(0) = 0.
  static ProxPenalty box(double lo, double hi);
  /// Requires lambda >= 0.
  static ProxPenalty l1(double lambda);

  PenaltyKind kind() const noexcept { return kind_; }
  double lower() const noexcept { return lo_; }
  double upper() const noexcept { return hi_; }
  double lambda() const noexcept { return lambda_; }

  /// Psi(x); +inf outside the domain of indicator kinds.
  double eval(const Tensor& x) const;
  double eval_scalar(double x) const;

  /// sigma(z) = argmin_y 1/2 (y - z)^2 + Psi(y).
  Tensor prox(const Tensor& z) const { return prox_scaled(z, 1.0); }
  double prox_scalar(double z) const { return prox_scalar_scaled(z, 1.0); }

  /// prox of t * Psi for t >= 0.
  Tensor prox_scaled(const Tensor& z, double t) const;
  double prox_scalar_scaled(double z, double t) const;

  /// (1/2 |.|^2 + Psi)^*(z) = sup_y <z, y> - 1/2 |y|^2 - Psi(y).
  double conjugate_shifted(const Tensor& z) const;
  double conjugate_shifted_scalar(double z) const;

  /// Derivative of sigma at z (0 or 1 for every catalogue kind; 0 at kinks).
  double prox_derivative(double z) const;

  /// Nearest point of dom(Psi).
  Tensor project_domain(const Tensor& y) const;

  friend bool operator==(const ProxPenalty&, const ProxPenalty&) = default;

 private:
  ProxPenalty(PenaltyKind kind, double lo, double hi, double lambda)
      : kind_(kind), lo_(lo), hi_(hi), lambda_(lambda) {}

  PenaltyKind kind_;
  double lo_;
  double hi_;
  double lambda_;
};

}  // namespace lbinv
