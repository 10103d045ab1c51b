#include <cmath>
#include <ostream>

#include "lbinv/bregman.hpp"
#include "lbinv/errors.hpp"
#include "lbinv/rng.hpp"
#include "lbinv/solvers.hpp"

namespace lbinv {

bool RateTable::all_satisfied() const {
  for (const auto& row : rows) {
    if (!row.satisfied()) return false;
  }
  return !rows.empty();
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw ParameterError("loglog_slope needs >= 2 paired points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]) / n;
    my += std::log(ys[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw ParameterError("loglog_slope: abscissae are all equal");
  return sxy / sxx;
}

RateTable rate_experiment(const Layer& layer, const Tensor& v_dag, const RateConfig& cfg) {
  if (layer.penalty.kind() != PenaltyKind::NonNegIndicator) {
    throw ConstructionError("rate_experiment requires a ReLU layer");
  }
  if (layer.op.kind() != OperatorKind::DenseAffine) {
    throw ConstructionError("rate_experiment requires a dense layer");
  }
  if (v_dag.size() != layer.op.output_size()) throw DimensionError("source element must match layer output");
  const double v_norm = norm(v_dag);
  if (!(v_norm > 0.0)) throw ConstructionError("source element must be non-zero");

  // Source condition for R = 1/2 |.|^2: x_dag = W^T v_dag is the subgradient.
  const Tensor x_dag = layer.op.adjoint_apply(v_dag);
  const Tensor z_dag = layer.op.forward(x_dag);
  if (min_value(z_dag) < 0.0) {
    throw ConstructionError("W x_dag + b has negative entries; choose b so the clean data is active");
  }
  const Tensor y = layer.penalty.prox(z_dag);

  Rng rng(cfg.seed);
  Tensor direction(y.shape());
  for (double& e : direction.values()) e = rng.normal();
  direction *= 1.0 / norm(direction);

  const BregmanLoss loss(layer.penalty);
  const Regulariser reg = Regulariser::squared_l2();
  const double lipschitz = operator_norm_sq(layer.op);
  const double constant = 2.0 * std::sqrt((1.0 + cfg.c) / cfg.c) * v_norm;

  RateTable table;
  std::vector<double> deltas, dists;
  for (double delta : cfg.deltas) {
    if (delta < 0.0 || !std::isfinite(delta)) throw ParameterError("rate_experiment deltas must be >= 0");
    // alpha(0) = 0 leaves the problem unregularised; only the limit matters.
    if (delta == 0.0) continue;
    // 1/2 |e|^2 = delta^2; with y_delta and z_dag both non-negative the
    // Bregman loss reduces to this squared distance.
    Tensor y_delta = y;
    axpy(std::sqrt(2.0) * delta, direction, y_delta);
    y_delta = layer.penalty.project_domain(y_delta);
    const double realised = loss.loss(y_delta, z_dag);
    if (realised > delta * delta * (1.0 + 1e-12)) {
      throw ConstructionError("noise realisation exceeds delta^2");
    }

    const double alpha = alpha_schedule(delta, cfg.c, v_norm);
    for (std::size_t i = 0; i < v_dag.size(); ++i) {
      if (std::abs(v_dag[i]) * alpha > cfg.c * y_delta[i]) {
        throw ConstructionError("Burbea-Rao feasibility fails at delta = " + std::to_string(delta) +
                                ": |v_i| > (c / alpha) y_delta_i for i = " + std::to_string(i));
      }
    }

    const PdhgConfig pdhg =
        PdhgConfig::standard(alpha, lipschitz, reg.k_norm_sq(), cfg.max_iters, cfg.stop_tol);
    const PdhgResult solved =
        pdhg_invert_perceptron(layer, y_delta, reg, pdhg, Tensor(layer.op.input_shape()));

    RateRow row;
    row.delta = delta;
    row.alpha = alpha;
    row.d_sym = symmetric_bregman(solved.x, x_dag, solved.x, x_dag);
    row.bound = constant * delta;
    row.data_loss = loss.loss(y_delta, layer.op.forward(solved.x));
    table.rows.push_back(row);
    deltas.push_back(delta);
    dists.push_back(row.d_sym);
  }
  if (table.rows.size() >= 2) table.loglog_slope = loglog_slope(deltas, dists);
  return table;
}

void write_rate_csv(std::ostream& out, const RateTable& table) {
  out << "delta,alpha,d_sym,bound\n";
  out.precision(10);
  for (const auto& row : table.rows) {
    out << row.delta << ',' << row.alpha << ',' << row.d_sym << ',' << row.bound << '\n';
  }
}

}  // namespace lbinv
