#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "lbinv/bregman.hpp"
#include "lbinv/errors.hpp"
#include "lbinv/solvers.hpp"

namespace lbinv {

Regulariser Regulariser::total_variation(std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) throw ParameterError("TV image dimensions must be positive");
  Regulariser r(RegulariserKind::TotalVariation);
  r.height_ = height;
  r.width_ = width;
  return r;
}

Regulariser Regulariser::penalty(ProxPenalty p) {
  Regulariser r(RegulariserKind::Penalty);
  r.penalty_ = p;
  return r;
}

Tensor Regulariser::as_image(const Tensor& x) const {
  if (x.size() != height_ * width_) {
    throw DimensionError("TV regulariser expects " + std::to_string(height_ * width_) +
                         " pixels, got " + to_string(x.shape()));
  }
  return x.reshaped({height_, width_});
}

double Regulariser::value(const Tensor& x) const {
  switch (kind_) {
    case RegulariserKind::TotalVariation: return tv_norm(as_image(x));
    case RegulariserKind::SquaredL2: return 0.5 * squared_norm(x);
    case RegulariserKind::Penalty: return penalty_.eval(x);
  }
  return 0.0;
}

Tensor Regulariser::apply_k(const Tensor& x) const {
  if (kind_ == RegulariserKind::TotalVariation) return grad_image(as_image(x)).data;
  return x;
}

Tensor Regulariser::apply_k_adjoint(const Tensor& dual, const Shape& primal_shape) const {
  if (kind_ == RegulariserKind::TotalVariation) {
    Tensor d = div_field(DualField{dual});
    d *= -1.0;
    return d.reshaped(primal_shape);
  }
  return dual.reshaped(primal_shape);
}

Tensor Regulariser::dual_prox(const Tensor& v, double tau) const {
  switch (kind_) {
    case RegulariserKind::TotalVariation:
      return project_dual_ball(DualField{v}).data;
    case RegulariserKind::SquaredL2: {
      Tensor out = v;
      out *= 1.0 / (1.0 + tau);
      return out;
    }
    case RegulariserKind::Penalty: {
      // prox_{tau R*}(v) = v - tau prox_{R / tau}(v / tau)
      Tensor scaled = v;
      scaled *= 1.0 / tau;
      Tensor out = v;
      axpy(-tau, penalty_.prox_scaled(scaled, 1.0 / tau), out);
      return out;
    }
  }
  return v;
}

Tensor Regulariser::zero_dual(const Shape& primal_shape) const {
  if (kind_ == RegulariserKind::TotalVariation) return Tensor({height_, width_, 2});
  return Tensor(primal_shape);
}

double Regulariser::k_norm_sq() const {
  return kind_ == RegulariserKind::TotalVariation ? kGradientNormSqBound : 1.0;
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Tolerance: return "tolerance";
    case StopReason::MaxIters: return "max_iters";
    case StopReason::Discrepancy: return "discrepancy";
  }
  return "unknown";
}

void write_report_csv(std::ostream& out, const SolveReport& report) {
  out << "iteration,residual\n";
  for (std::size_t k = 0; k < report.residual_history.size(); ++k) {
    out << (k + 1) << ',' << report.residual_history[k] << '\n';
  }
  out << "# iterations=" << report.iterations << ",objective=" << report.final_objective
      << ",stop=" << to_string(report.stop_reason) << ",seconds=" << report.elapsed_seconds
      << '\n';
}

PdhgConfig PdhgConfig::standard(double alpha, double lipschitz, double k_norm_sq,
                                std::size_t max_iters, double stop_tol) {
  if (!(lipschitz > 0.0)) throw ParameterError("PdhgConfig: Lipschitz constant must be positive");
  PdhgConfig cfg;
  cfg.alpha = alpha;
  cfg.tau_z = alpha > 0.0 ? 1.0 / (k_norm_sq * alpha) : 1.0;
  cfg.tau_x = std::min(1.99 / lipschitz, 0.99 / (0.5 * lipschitz + alpha));
  cfg.max_iters = max_iters;
  cfg.stop_tol = stop_tol;
  return cfg;
}

double perceptron_objective(const Layer& layer, const Tensor& y, const Regulariser& reg,
                            double alpha, const Tensor& x) {
  const double data = BregmanLoss(layer.penalty).loss(y, layer.op.forward(x));
  if (alpha == 0.0) return data;
  return data + alpha * reg.value(x);
}

double squared_l2_stationarity(const Layer& layer, const Tensor& y, double alpha,
                               const Tensor& x) {
  Tensor residual = layer.penalty.prox(layer.op.forward(x));
  residual -= y;
  Tensor g = layer.op.adjoint_apply(residual);
  axpy(alpha, x.reshaped(g.shape()), g);
  return norm(g);
}

PdhgResult pdhg_invert_perceptron(const Layer& layer, const Tensor& y_delta,
                                  const Regulariser& reg, const PdhgConfig& cfg,
                                  const Tensor& x0, const Tensor& dual0) {
  const auto start = std::chrono::steady_clock::now();
  if (!(cfg.tau_x > 0.0) || !(cfg.tau_z > 0.0)) throw ParameterError("PDHG step sizes must be positive");
  if (cfg.alpha < 0.0) throw ParameterError("PDHG alpha must be non-negative");
  if (y_delta.size() != layer.op.output_size()) {
    throw DimensionError("PDHG data " + to_string(y_delta.shape()) + " does not match layer output " +
                         to_string(layer.op.output_shape()));
  }
  if (x0.size() != layer.op.input_size()) {
    throw DimensionError("PDHG start " + to_string(x0.shape()) + " does not match layer input " +
                         to_string(layer.op.input_shape()));
  }

  const Tensor y = layer.penalty.project_domain(y_delta);
  const Shape& x_shape = x0.shape();
  const bool regularised = cfg.alpha > 0.0;

  PdhgResult result;
  result.x = x0;
  result.dual = dual0.empty() ? reg.zero_dual(x_shape) : dual0;
  Tensor kx = regularised ? reg.apply_k(result.x) : Tensor();
  if (regularised) require_same_size(result.dual, kx, "PDHG dual start");

  SolveReport& report = result.report;
  report.stop_reason = StopReason::MaxIters;
  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    Tensor residual = layer.penalty.prox(layer.op.forward(result.x));
    residual -= y;
    Tensor step = layer.op.adjoint_apply(residual).reshaped(x_shape);
    if (regularised) axpy(cfg.alpha, reg.apply_k_adjoint(result.dual, x_shape), step);

    Tensor x_next = result.x;
    axpy(-cfg.tau_x, step, x_next);
    double change_sq = 0.0;
    for (std::size_t i = 0; i < x_next.size(); ++i) {
      const double d = x_next[i] - result.x[i];
      change_sq += d * d;
    }

    if (regularised) {
      Tensor kx_next = reg.apply_k(x_next);
      Tensor ascent = result.dual;
      for (std::size_t i = 0; i < ascent.size(); ++i) {
        ascent[i] += cfg.tau_z * cfg.alpha * (2.0 * kx_next[i] - kx[i]);
      }
      // The dual pairs with alpha K, so the conjugate of u -> alpha R(u / alpha) is alpha R^*.
      // Indicator conjugates (TV, L1) ignore the extra factor.
      Tensor dual_next = reg.dual_prox(ascent, cfg.tau_z * cfg.alpha);
      for (std::size_t i = 0; i < dual_next.size(); ++i) {
        const double d = dual_next[i] - result.dual[i];
        change_sq += d * d;
      }
      result.dual = std::move(dual_next);
      kx = std::move(kx_next);
    }

    if (!std::isfinite(change_sq) || !x_next.all_finite()) {
      throw DivergenceError("pdhg_invert_perceptron", k + 1);
    }
    result.x = std::move(x_next);
    const double change = std::sqrt(change_sq);
    report.residual_history.push_back(change);
    if (change < cfg.stop_tol) {
      report.stop_reason = StopReason::Tolerance;
      break;
    }
  }
  report.iterations = report.residual_history.size();
  report.final_objective = perceptron_objective(layer, y, reg, cfg.alpha, result.x);
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace lbinv
