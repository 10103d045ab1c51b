#include <chrono>
#include <cmath>

#include "lbinv/bregman.hpp"
#include "lbinv/errors.hpp"
#include "lbinv/solvers.hpp"

namespace lbinv {

namespace {

// Post-activation variable feeding layer l (x_0 for l = 0).
const Tensor& layer_input(std::size_t l, const Tensor& x0, const std::vector<Tensor>& hidden) {
  return l == 0 ? x0 : hidden[l - 1];
}

// Post-activation target of layer l (y for the last layer).
const Tensor& layer_target(std::size_t l, const Tensor& y, const std::vector<Tensor>& hidden) {
  return l < hidden.size() ? hidden[l] : y;
}

double squared_distance(const Tensor& a, const Tensor& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

CoordinateDescentConfig CoordinateDescentConfig::standard(const Network& net,
                                                          const Regulariser& reg, double alpha,
                                                          std::size_t outer_iters) {
  if (net.depth() < 2) throw ParameterError("coordinate descent needs at least two layers");
  CoordinateDescentConfig cfg;
  const PdhgConfig inner =
      PdhgConfig::standard(alpha, operator_norm_sq(net.layer(0).op), reg.k_norm_sq());
  cfg.alpha = alpha;
  cfg.tau_x0 = inner.tau_x;
  cfg.tau_z = inner.tau_z;
  for (std::size_t l = 1; l < net.depth(); ++l) {
    cfg.tau_hidden.push_back(1.99 / operator_norm_sq(net.layer(l).op));
  }
  cfg.outer_iters = outer_iters;
  return cfg;
}

double lifted_objective(const Network& net, const Tensor& y, const Regulariser& reg,
                        double alpha, const Tensor& x0, const std::vector<Tensor>& hidden) {
  if (hidden.size() + 1 != net.depth()) {
    throw DimensionError("lifted_objective: expected " + std::to_string(net.depth() - 1) +
                         " auxiliary variables, got " + std::to_string(hidden.size()));
  }
  double total = alpha > 0.0 ? alpha * reg.value(x0) : 0.0;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const Layer& layer = net.layer(l);
    total += BregmanLoss(layer.penalty)
                 .loss(layer_target(l, y, hidden), layer.op.forward(layer_input(l, x0, hidden)));
  }
  return total;
}

CoordinateDescentResult coordinate_descent_invert(const Network& net, const Tensor& y_delta,
                                                  const Regulariser& reg,
                                                  const CoordinateDescentConfig& cfg,
                                                  const Tensor& x0,
                                                  std::optional<std::vector<Tensor>> hidden0) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t depth = net.depth();
  if (depth < 2) throw ParameterError("coordinate descent needs at least two layers");
  if (cfg.tau_hidden.size() != depth - 1) {
    throw ParameterError("coordinate descent needs one step size per auxiliary variable");
  }
  if (y_delta.size() != net.layer(depth - 1).op.output_size()) {
    throw DimensionError("coordinate descent data does not match network output");
  }

  const Tensor y = net.layer(depth - 1).penalty.project_domain(y_delta);

  CoordinateDescentResult result;
  result.x0 = x0;
  if (hidden0) {
    result.hidden = std::move(*hidden0);
  } else {
    result.hidden = hidden_states(net, x0);
    result.hidden.pop_back();
  }
  if (result.hidden.size() != depth - 1) {
    throw DimensionError("coordinate descent needs L - 1 auxiliary starting points");
  }

  const Layer& first = net.layer(0);
  PdhgConfig inner;
  inner.alpha = cfg.alpha;
  inner.tau_x = cfg.tau_x0;
  inner.tau_z = cfg.tau_z;
  inner.max_iters = cfg.inner_iters;
  inner.stop_tol = 0.0;
  Tensor dual = reg.zero_dual(x0.shape());

  SolveReport& report = result.report;
  report.stop_reason = StopReason::MaxIters;
  result.objective_history.push_back(
      lifted_objective(net, y, reg, cfg.alpha, result.x0, result.hidden));

  for (std::size_t k = 0; k < cfg.outer_iters; ++k) {
    double change_sq = 0.0;

    // x_0: warm-started PDHG against the current x_1, kept only if it does not
    // increase the block objective (PDHG is not monotone over a truncated run).
    {
      const Tensor& target = result.hidden.front();
      PdhgResult step = pdhg_invert_perceptron(first, target, reg, inner, result.x0, dual);
      dual = std::move(step.dual);
      const double before = perceptron_objective(first, target, reg, cfg.alpha, result.x0);
      const double after = perceptron_objective(first, target, reg, cfg.alpha, step.x);
      if (after <= before) {
        change_sq += squared_distance(step.x, result.x0);
        result.x0 = std::move(step.x);
      }
    }

    // x_l, l = 1 .. L-1: one proximal-gradient step each.
    for (std::size_t l = 1; l < depth; ++l) {
      const Layer& own = net.layer(l - 1);
      const Layer& next = net.layer(l);
      Tensor& xl = result.hidden[l - 1];
      const double tau = cfg.tau_hidden[l - 1];

      const Tensor pre = own.op.forward(layer_input(l - 1, result.x0, result.hidden));
      Tensor residual = next.penalty.prox(next.op.forward(xl));
      residual -= layer_target(l, y, result.hidden);
      const Tensor grad = next.op.adjoint_apply(residual);

      Tensor arg(xl.shape());
      for (std::size_t i = 0; i < arg.size(); ++i) {
        arg[i] = (xl[i] - tau * (grad[i] - pre[i])) / (1.0 + tau);
      }
      Tensor updated = own.penalty.prox_scaled(arg, tau / (1.0 + tau));
      if (!updated.all_finite()) throw DivergenceError("coordinate_descent_invert", k + 1);
      change_sq += squared_distance(updated, xl);
      xl = std::move(updated);
    }

    if (!result.x0.all_finite()) throw DivergenceError("coordinate_descent_invert", k + 1);
    result.objective_history.push_back(
        lifted_objective(net, y, reg, cfg.alpha, result.x0, result.hidden));
    const double change = std::sqrt(change_sq);
    report.residual_history.push_back(change);
    if (change < cfg.stop_tol) {
      report.stop_reason = StopReason::Tolerance;
      break;
    }
  }

  report.iterations = report.residual_history.size();
  report.final_objective = result.objective_history.back();
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace lbinv
