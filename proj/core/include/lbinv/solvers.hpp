#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lbinv/network.hpp"
#include "lbinv/prox.hpp"
#include "lbinv/tensor.hpp"
#include "lbinv/tv.hpp"

namespace lbinv {

// ---------------------------------------------------------------------------
// Regularisers R(Kx)
// ---------------------------------------------------------------------------

enum class RegulariserKind { TotalVariation, SquaredL2, Penalty };

/// Convex prior R composed with a linear map K.
///
///   TotalVariation  K = forward-difference gradient on an H x W image, R = |.|_{2,1}
///   SquaredL2       K = I, R = 1/2 |.|^2
///   Penalty         K = I, R = Psi for a catalogue penalty (L1, indicators, zero)
///
/// The dual variable lives in the range of K: H x W x 2 for TV, the shape of x otherwise.
class Regulariser {
 public:
  static Regulariser total_variation(std::size_t height, std::size_t width);
  static Regulariser squared_l2() { return Regulariser(RegulariserKind::SquaredL2); }
  static Regulariser l1(double lambda = 1.0) { return penalty(ProxPenalty::l1(lambda)); }
  static Regulariser penalty(ProxPenalty p);

  RegulariserKind kind() const noexcept { return kind_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  const ProxPenalty& prior() const noexcept { return penalty_; }

  /// R(Kx); +inf for infeasible indicator priors.
  double value(const Tensor& x) const;
  Tensor apply_k(const Tensor& x) const;
  Tensor apply_k_adjoint(const Tensor& dual, const Shape& primal_shape) const;
  /// prox of tau R^* (Moreau identity for catalogue penalties).
  Tensor dual_prox(const Tensor& v, double tau) const;
  Tensor zero_dual(const Shape& primal_shape) const;
  /// Upper bound on |K|^2.
  double k_norm_sq() const;

 private:
  explicit Regulariser(RegulariserKind kind) : kind_(kind) {}

  Tensor as_image(const Tensor& x) const;

  RegulariserKind kind_;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  ProxPenalty penalty_ = ProxPenalty::zero();
};

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class StopReason { Tolerance, MaxIters, Discrepancy };

const char* to_string(StopReason reason);

struct SolveReport {
  std::size_t iterations = 0;
  double final_objective = 0.0;
  /// One entry per iteration: iterate change for PDHG / coordinate descent,
  /// data residual for Landweber.
  std::vector<double> residual_history;
  StopReason stop_reason = StopReason::MaxIters;
  double elapsed_seconds = 0.0;
};

/// CSV: header "iteration,residual", one row per iteration, then a
/// "# iterations=..,objective=..,stop=..,seconds=.." summary line.
void write_report_csv(std::ostream& out, const SolveReport& report);

// ---------------------------------------------------------------------------
// PDHG for a single layer
// ---------------------------------------------------------------------------

struct PdhgConfig {
  double alpha = 0.0;
  double tau_x = 1.0;
  double tau_z = 1.0;
  std::size_t max_iters = 10000;
  double stop_tol = 1e-5;

  /// tau_z = 1 / (|K|^2 alpha) and tau_x = min(1.99 / L, 0.99 / (L / 2 + alpha)),
  /// with L = |W|^2 the Lipschitz constant of the data term's gradient.
  static PdhgConfig standard(double alpha, double lipschitz, double k_norm_sq,
                             std::size_t max_iters = 10000, double stop_tol = 1e-5);
};

struct PdhgResult {
  Tensor x;
  Tensor dual;
  SolveReport report;
};

/// Minimises B_Psi(y, W x + b) + alpha R(K x) by the generalised PDHG iteration
///
///   x+ = x - tau_x (W^T (sigma(W x + b) - y) + alpha K^T z)
///   z+ = prox_{tau_z alpha R^*}(z + tau_z alpha K (2 x+ - x))
///
/// The alpha in the dual prox keeps non-homogeneous priors (1/2 |.|^2) weighted
/// by alpha rather than alpha^2; for TV and L1 it drops out.
/// Data outside dom(Psi) is projected onto it first (noisy ReLU codes are
/// clipped at zero). Stops when the Euclidean norm of the joint change
/// (x+ - x, z+ - z) drops below stop_tol. An empty dual0 means zero.
PdhgResult pdhg_invert_perceptron(const Layer& layer, const Tensor& y_delta,
                                  const Regulariser& reg, const PdhgConfig& cfg,
                                  const Tensor& x0, const Tensor& dual0 = Tensor());

/// B_Psi(y, W x + b) + alpha R(K x).
double perceptron_objective(const Layer& layer, const Tensor& y, const Regulariser& reg,
                            double alpha, const Tensor& x);

/// |W^T (sigma(W x + b) - y) + alpha x|, the first-order residual for R = 1/2 |.|^2.
double squared_l2_stationarity(const Layer& layer, const Tensor& y, double alpha,
                               const Tensor& x);

// ---------------------------------------------------------------------------
// Coordinate descent for multi-layer networks
// ---------------------------------------------------------------------------

struct CoordinateDescentConfig {
  double alpha = 0.0;
  double tau_x0 = 1.0;
  double tau_z = 1.0;
  /// Step for each auxiliary variable x_1 .. x_{L-1}.
  std::vector<double> tau_hidden;
  std::size_t outer_iters = 100;
  /// PDHG iterations per x_0 update.
  std::size_t inner_iters = 50;
  /// Stop once the joint change of all blocks in a sweep is below this.
  double stop_tol = 0.0;

  /// PDHG steps from layer 1; tau_{x_l} = 1.99 / |W_{l+1}|^2.
  static CoordinateDescentConfig standard(const Network& net, const Regulariser& reg,
                                          double alpha, std::size_t outer_iters);
};

struct CoordinateDescentResult {
  Tensor x0;
  /// x_1 .. x_{L-1}.
  std::vector<Tensor> hidden;
  SolveReport report;
  /// Lifted objective before the first sweep and after every sweep.
  std::vector<double> objective_history;
};

/// sum_l B_{Psi_l}(x_l, f(x_{l-1}, Theta_l)) + alpha R(K x_0), with x_L = y.
double lifted_objective(const Network& net, const Tensor& y, const Regulariser& reg,
                        double alpha, const Tensor& x0, const std::vector<Tensor>& hidden);

/// Block coordinate descent on the lifted objective. Each sweep runs a
/// warm-started PDHG on x_0 (accepted only if it does not increase the x_0
/// block objective), then one proximal-gradient step on x_1 .. x_{L-1} in
/// ascending order. Hidden states default to hidden_states(net, x0).
CoordinateDescentResult coordinate_descent_invert(
    const Network& net, const Tensor& y_delta, const Regulariser& reg,
    const CoordinateDescentConfig& cfg, const Tensor& x0,
    std::optional<std::vector<Tensor>> hidden0 = std::nullopt);

// ---------------------------------------------------------------------------
// Sequential layer-wise inversion
// ---------------------------------------------------------------------------

struct SequentialConfig {
  /// alphas[l] weights the prior on the unknown input of layer l.
  std::vector<double> alphas;
  std::size_t max_iters = 10000;
  double stop_tol = 1e-8;
};

struct SequentialResult {
  Tensor x0;
  /// Estimated inputs of layers 1 .. L-1 (x_1 .. x_{L-1}).
  std::vector<Tensor> hidden;
  SolveReport report;
  /// One report per stage, back to front.
  std::vector<SolveReport> stages;
};

/// Inverts layers back to front: layer l's input is estimated with prior
/// Psi_{l-1} (the activation that produced it), the first layer with reg_first.
SequentialResult sequential_invert(const Network& net, const Tensor& y_delta,
                                   const SequentialConfig& cfg, const Regulariser& reg_first);

// ---------------------------------------------------------------------------
// Landweber baseline
// ---------------------------------------------------------------------------

struct LandweberResult {
  Tensor x;
  SolveReport report;
};

/// x+ = x - step W^T (sigma(W x + b) - y) from x = 0, stopped by the
/// discrepancy principle |sigma(W x + b) - y| <= tau_disc * delta.
/// Callers pick step <= 1.99 / |W|^2.
LandweberResult landweber_invert(const Layer& layer, const Tensor& y_delta, double delta,
                                 double tau_disc, double step, std::size_t max_iters);

// ---------------------------------------------------------------------------
// Convergence-rate harness for the ReLU perceptron with R = 1/2 |.|^2
// ---------------------------------------------------------------------------

struct RateConfig {
  double c = 1.0;
  std::vector<double> deltas;
  std::uint64_t seed = 0;
  std::size_t max_iters = 200000;
  double stop_tol = 1e-13;
};

struct RateRow {
  double delta = 0.0;
  double alpha = 0.0;
  double d_sym = 0.0;
  double bound = 0.0;
  /// B_Psi(y_delta, W x_alpha + b).
  double data_loss = 0.0;
  bool satisfied() const { return d_sym <= bound; }
};

struct RateTable {
  std::vector<RateRow> rows;
  /// Least-squares slope of log d_sym against log delta.
  double loglog_slope = 0.0;
  bool all_satisfied() const;
};

/// For x_dag = W^T v_dag (so the source condition holds with R = 1/2 |.|^2),
/// perturbs y = sigma(W x_dag + b) to B_Psi(y_delta, W x_dag + b) = delta^2,
/// solves with alpha = alpha_schedule(delta), and tabulates the symmetric
/// Bregman distance |x_alpha - x_dag|^2 against 2 sqrt((1 + c)/c) |v_dag| delta.
/// Throws ConstructionError if W x_dag + b has negative entries or the
/// Burbea-Rao feasibility condition fails for some delta.
RateTable rate_experiment(const Layer& layer, const Tensor& v_dag, const RateConfig& cfg);

/// CSV with header "delta,alpha,d_sym,bound".
void write_rate_csv(std::ostream& out, const RateTable& table);

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace lbinv
