#include "lbinv/prox.hpp"

#include <algorithm>
#include <cmath>

#include "lbinv/errors.hpp"

namespace lbinv {

const char* to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::Zero: return "zero";
    case PenaltyKind::NonNegIndicator: return "relu";
    case PenaltyKind::BoxIndicator: return "box";
    case PenaltyKind::L1: return "l1";
  }
  return "unknown";
}

ProxPenalty ProxPenalty::box(double lo, double hi) {
  if (!(lo <= 0.0 && 0.0 <= hi)) throw ParameterError("box penalty needs lo <= 0 <= hi");
  return ProxPenalty(PenaltyKind::BoxIndicator, lo, hi, 0.0);
}

ProxPenalty ProxPenalty::l1(double lambda) {
  if (!(lambda >= 0.0)) throw ParameterError("l1 penalty needs lambda >= 0");
  return ProxPenalty(PenaltyKind::L1, 0.0, 0.0, lambda);
}

double ProxPenalty::eval_scalar(double x) const {
  switch (kind_) {
    case PenaltyKind::Zero: return 0.0;
    case PenaltyKind::NonNegIndicator: return x >= 0.0 ? 0.0 : kInfinity;
    case PenaltyKind::BoxIndicator: return (x >= lo_ && x <= hi_) ? 0.0 : kInfinity;
    case PenaltyKind::L1: return lambda_ * std::abs(x);
  }
  return kInfinity;
}

double ProxPenalty::eval(const Tensor& x) const {
  double acc = 0.0;
  for (double v : x.values()) {
    const double e = eval_scalar(v);
    if (e == kInfinity) return kInfinity;
    acc += e;
  }
  return acc;
}

double ProxPenalty::prox_scalar_scaled(double z, double t) const {
  switch (kind_) {
    case PenaltyKind::Zero: return z;
    case PenaltyKind::NonNegIndicator: return z > 0.0 ? z : 0.0;
    case PenaltyKind::BoxIndicator: return std::clamp(z, lo_, hi_);
    case PenaltyKind::L1: {
      const double thr = t * lambda_;
      if (z > thr) return z - thr;
      if (z < -thr) return z + thr;
      return 0.0;
    }
  }
  return z;
}

Tensor ProxPenalty::prox_scaled(const Tensor& z, double t) const {
  if (t < 0.0) throw ParameterError("prox scale must be non-negative");
  Tensor out = z;
  for (double& v : out.values()) v = prox_scalar_scaled(v, t);
  return out;
}

double ProxPenalty::conjugate_shifted_scalar(double z) const {
  // The supremum is attained at y = sigma(z).
  const double p = prox_scalar(z);
  return z * p - 0.5 * p * p - eval_scalar(p);
}

double ProxPenalty::conjugate_shifted(const Tensor& z) const {
  double acc = 0.0;
  for (double v : z.values()) acc += conjugate_shifted_scalar(v);
  return acc;
}

double ProxPenalty::prox_derivative(double z) const {
  switch (kind_) {
    case PenaltyKind::Zero: return 1.0;
    case PenaltyKind::NonNegIndicator: return z > 0.0 ? 1.0 : 0.0;
    case PenaltyKind::BoxIndicator: return (z > lo_ && z < hi_) ? 1.0 : 0.0;
    case PenaltyKind::L1: return std::abs(z) > lambda_ ? 1.0 : 0.0;
  }
  return 1.0;
}

Tensor ProxPenalty::project_domain(const Tensor& y) const {
  Tensor out = y;
  switch (kind_) {
    case PenaltyKind::NonNegIndicator:
      for (double& v : out.values()) v = std::max(v, 0.0);
      break;
    case PenaltyKind::BoxIndicator:
      for (double& v : out.values()) v = std::clamp(v, lo_, hi_);
      break;
    case PenaltyKind::Zero:
    case PenaltyKind::L1:
      break;
  }
  return out;
}

}  // namespace lbinv
