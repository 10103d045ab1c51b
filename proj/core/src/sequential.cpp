#include <chrono>

#include "lbinv/errors.hpp"
#include "lbinv/solvers.hpp"

namespace lbinv {

SequentialResult sequential_invert(const Network& net, const Tensor& y_delta,
                                   const SequentialConfig& cfg, const Regulariser& reg_first) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t depth = net.depth();
  if (depth == 0) throw ParameterError("sequential_invert on empty network");
  if (cfg.alphas.size() != depth) {
    throw ParameterError("sequential_invert needs one alpha per layer (" + std::to_string(depth) +
                         "), got " + std::to_string(cfg.alphas.size()));
  }

  SequentialResult result;
  result.hidden.resize(depth - 1);
  Tensor data = y_delta;
  for (std::size_t l = depth; l-- > 0;) {
    const Layer& layer = net.layer(l);
    const Regulariser reg = l == 0 ? reg_first : Regulariser::penalty(net.layer(l - 1).penalty);
    const PdhgConfig pdhg = PdhgConfig::standard(cfg.alphas[l], operator_norm_sq(layer.op),
                                                 reg.k_norm_sq(), cfg.max_iters, cfg.stop_tol);
    PdhgResult stage =
        pdhg_invert_perceptron(layer, data, reg, pdhg, Tensor(layer.op.input_shape()));
    result.stages.push_back(stage.report);
    data = std::move(stage.x);
    if (l > 0) result.hidden[l - 1] = data;
  }

  result.x0 = std::move(data);
  SolveReport& report = result.report;
  report.stop_reason = StopReason::Tolerance;
  for (const auto& stage : result.stages) {
    report.iterations += stage.iterations;
    report.residual_history.insert(report.residual_history.end(), stage.residual_history.begin(),
                                   stage.residual_history.end());
    if (stage.stop_reason == StopReason::MaxIters) report.stop_reason = StopReason::MaxIters;
  }
  report.final_objective = result.stages.back().final_objective;
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace lbinv
