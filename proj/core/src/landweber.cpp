#include <chrono>
#include <cmath>

#include "lbinv/bregman.hpp"
#include "lbinv/errors.hpp"
#include "lbinv/solvers.hpp"

namespace lbinv {

LandweberResult landweber_invert(const Layer& layer, const Tensor& y_delta, double delta,
                                 double tau_disc, double step, std::size_t max_iters) {
  const auto start = std::chrono::steady_clock::now();
  if (!(step > 0.0)) throw ParameterError("Landweber step must be positive");
  if (!(delta >= 0.0) || !(tau_disc > 0.0)) throw ParameterError("Landweber needs delta >= 0, tau > 0");
  if (y_delta.size() != layer.op.output_size()) {
    throw DimensionError("Landweber data does not match layer output");
  }

  const Tensor y = layer.penalty.project_domain(y_delta);
  const double threshold = tau_disc * delta;

  LandweberResult result;
  result.x = Tensor(layer.op.input_shape());
  SolveReport& report = result.report;
  report.stop_reason = StopReason::MaxIters;
  for (std::size_t k = 0;; ++k) {
    Tensor residual = layer.penalty.prox(layer.op.forward(result.x));
    residual -= y;
    const double r = norm(residual);
    if (!std::isfinite(r)) throw DivergenceError("landweber_invert", k);
    if (r <= threshold) {
      report.stop_reason = StopReason::Discrepancy;
      break;
    }
    if (k == max_iters) break;
    axpy(-step, layer.op.adjoint_apply(residual), result.x);
    report.residual_history.push_back(r);
  }
  report.iterations = report.residual_history.size();
  report.final_objective = BregmanLoss(layer.penalty).loss(y, layer.op.forward(result.x));
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace lbinv
