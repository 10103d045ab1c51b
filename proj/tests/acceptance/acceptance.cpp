// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "lbinv/bregman.hpp"
#include "lbinv/config.hpp"
#include "lbinv/data_io.hpp"
#include "lbinv/experiments.hpp"
#include "lbinv/serialize.hpp"
#include "lbinv/solvers.hpp"
#include "lbinv/training.hpp"
#include "lbinv/tv.hpp"
#include "oracles.hpp"

using namespace lbinv;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// 1 ------------------------------------------------------------------------

Outcome rate_verification() {
  Outcome o;
  const auto start = Clock::now();
  const RateProblem p = make_rate_problem(0);
  std::string detail;
  for (double c : {0.5, 1.0}) {
    RateConfig cfg;
    cfg.c = c;
    cfg.deltas = parse_grid("1e-1:1e-4:geometric:7");
    const RateTable t = rate_experiment(p.layer, p.v_dag, cfg);
    double worst = 0.0;
    for (const auto& row : t.rows) worst = std::max(worst, row.d_sym / row.bound);
    if (t.rows.size() != 7) o.fail("c=" + fmt(c) + ": " + std::to_string(t.rows.size()) + " rows");
    if (!t.all_satisfied()) o.fail("c=" + fmt(c) + ": bound violated (max ratio " + fmt(worst) + ")");
    if (t.loglog_slope < 0.8) o.fail("c=" + fmt(c) + ": slope " + fmt(t.loglog_slope));
    detail += "c=" + fmt(c) + " slope " + fmt(t.loglog_slope) + " max d_sym/bound " + fmt(worst) + "; ";
  }
  const double secs = seconds_since(start);
  if (secs >= 30.0) o.fail("took " + fmt(secs) + " s");
  if (o.pass) o.detail = detail + fmt(secs) + " s";
  return o;
}

// 2 ------------------------------------------------------------------------

Outcome circle_orderings() {
  Outcome o;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto start = Clock::now();
    CircleParams p;
    p.seed = seed;
    const CircleResult r = run_circle(p);
    const double secs = seconds_since(start);
    for (const auto& f : r.ordering_failures()) o.fail("seed " + std::to_string(seed) + ": " + f);
    if (secs >= 300.0) o.fail("seed " + std::to_string(seed) + " took " + fmt(secs) + " s");
    detail += "seed " + std::to_string(seed) + " tv " + fmt(r.tv_tv) + "<" + fmt(r.tv_truth) + "<" +
              fmt(r.tv_landweber) + " l2 " + fmt(r.l2_tv) + "/" + fmt(r.l2_landweber) + " vs " +
              fmt(r.l2_truth) + " (" + fmt(secs) + " s); ";
  }
  if (o.pass) o.detail = detail;
  return o;
}

// 3 ------------------------------------------------------------------------

Outcome tikhonov_oracle() {
  Outcome o;
  Rng rng(2024);
  double worst_gap = 0.0, worst_stat = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Tensor w = oracle::random_tensor({8, 8}, rng);
    const Layer layer{LinearOperator::dense(w, oracle::random_tensor({8}, rng)), ProxPenalty::zero()};
    const Tensor y = oracle::random_tensor({8}, rng);
    const double alpha = std::pow(10.0, rng.uniform(-2.0, 0.0));
    const Regulariser reg = Regulariser::squared_l2();
    const PdhgConfig cfg = PdhgConfig::standard(alpha, operator_norm_sq(layer.op), reg.k_norm_sq(), 500000, 1e-12);
    const PdhgResult r = pdhg_invert_perceptron(layer, y, reg, cfg, Tensor({8}));

    const Eigen::MatrixXd we = oracle::materialize(layer.op);
    const Eigen::VectorXd closed =
        (we.transpose() * we + alpha * Eigen::MatrixXd::Identity(8, 8))
            .ldlt()
            .solve(we.transpose() * (oracle::to_eigen(y) - oracle::to_eigen(layer.op.bias())));
    const double gap = (oracle::to_eigen(r.x) - closed).norm() / (1.0 + closed.norm());
    const double stat = squared_l2_stationarity(layer, y, alpha, r.x) / (1.0 + norm(r.x));
    worst_gap = std::max(worst_gap, gap);
    worst_stat = std::max(worst_stat, stat);
    if (gap > 1e-6) o.fail("instance " + std::to_string(trial) + " off the closed form by " + fmt(gap));
    if (stat > 1e-5) o.fail("instance " + std::to_string(trial) + " stationarity " + fmt(stat));
  }
  if (o.pass) o.detail = "20 instances, max relative gap " + fmt(worst_gap) + ", max scaled stationarity " + fmt(worst_stat);
  return o;
}

// 4 ------------------------------------------------------------------------

Outcome cd_monotonicity() {
  Outcome o;
  Rng rng(77);
  auto layer = [&](std::size_t m, std::size_t n) {
    return Layer{random_dense(m, n, rng), ProxPenalty::relu()};
  };
  Network net({layer(48, 64), layer(32, 48), layer(20, 32)});
  for (std::size_t l = 0; l < 3; ++l) {
    const LinearOperator& op = net.layer(l).op;
    net.mutable_layer(l).op.gradient_step(Tensor(op.weight().shape()),
                                          oracle::random_tensor(op.bias().shape(), rng, -0.5, 0.0), 1.0);
  }
  const Tensor truth = circle_phantom(8, 8, 0.3);
  Tensor y = net_forward(net, truth) + oracle::random_tensor({20}, rng, -0.02, 0.02);
  y = ProxPenalty::relu().project_domain(y);
  const Regulariser tv = Regulariser::total_variation(8, 8);
  const CoordinateDescentConfig cfg = CoordinateDescentConfig::standard(net, tv, 1e-2, 100);
  const CoordinateDescentResult r = coordinate_descent_invert(net, y, tv, cfg, Tensor({8, 8}));
  const auto& h = r.objective_history;
  if (h.size() != 101) o.fail(std::to_string(h.size()) + " objective values");
  double worst = 0.0;
  for (std::size_t k = 1; k < h.size(); ++k) {
    const double rise = h[k] - h[k - 1];
    worst = std::max(worst, rise);
    if (rise > 1e-10) o.fail("sweep " + std::to_string(k) + " increased by " + fmt(rise));
  }
  if (o.pass) o.detail = "objective " + fmt(h.front()) + " -> " + fmt(h.back()) + ", max rise " + fmt(worst);
  return o;
}

// 5 ------------------------------------------------------------------------

Outcome invariant_suite() {
  Outcome o;
  const auto start = Clock::now();
  Rng rng(5);

  // adjoint identities
  double worst_adj = 0.0;
  auto adjoint_check = [&](const std::string& name, double lhs, double rhs) {
    const double rel = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
    worst_adj = std::max(worst_adj, rel);
    if (rel > 1e-10) o.fail(name + " adjoint off by " + fmt(rel));
  };
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor u = oracle::random_tensor({9, 7}, rng);
    const DualField p{oracle::random_tensor({9, 7, 2}, rng)};
    adjoint_check("grad/div", dot(grad_image(u).data, p.data), -dot(u, div_field(p)));

    const auto dense = LinearOperator::dense(oracle::random_tensor({6, 11}, rng), Tensor({6}));
    const Tensor x = oracle::random_tensor({11}, rng), v = oracle::random_tensor({6}, rng);
    adjoint_check("dense", dot(dense.apply_linear(x), v), dot(x, dense.adjoint_apply(v)));

    const auto conv = LinearOperator::conv2d(oracle::random_tensor({4, 3, 4, 4}, rng), Tensor({4}), 2, 1, 10, 10);
    const Tensor cx = oracle::random_tensor(conv.input_shape(), rng);
    const Tensor cv = oracle::random_tensor(conv.output_shape(), rng);
    adjoint_check("conv", dot(conv.apply_linear(cx), cv), dot(cx, conv.adjoint_apply(cv)));

    const auto convt = LinearOperator::conv_transpose2d(oracle::random_tensor({4, 3, 4, 4}, rng), Tensor({3}), 2, 1, 5, 5);
    const Tensor tx = oracle::random_tensor(convt.input_shape(), rng);
    const Tensor tv = oracle::random_tensor(convt.output_shape(), rng);
    adjoint_check("conv-transpose", dot(convt.apply_linear(tx), tv), dot(tx, convt.adjoint_apply(tv)));
  }

  const std::vector<ProxPenalty> penalties{ProxPenalty::zero(), ProxPenalty::relu(), ProxPenalty::box(-0.5, 1.0),
                                           ProxPenalty::l1(0.3)};

  // Bregman gradient against central differences, away from kinks
  double worst_grad = 0.0;
  for (const auto& pen : penalties) {
    const BregmanLoss loss(pen);
    for (int trial = 0; trial < 50; ++trial) {
      const Tensor x = pen.project_domain(oracle::random_tensor({5}, rng, -2, 2));
      Tensor z = oracle::random_tensor({5}, rng, -2, 2);
      for (double& zi : z.values()) {
        for (double kink : {-0.5, 0.0, 0.3, -0.3, 1.0}) {
          if (std::abs(zi - kink) < 1e-3) zi += 2e-3;
        }
      }
      const Tensor g = loss.grad_z(x, z);
      for (std::size_t i = 0; i < 5; ++i) {
        const double fd = oracle::central_difference([&](const Tensor& t) { return loss.loss(x, t); }, z, i, 1e-6);
        const double err = std::abs(fd - g[i]);
        worst_grad = std::max(worst_grad, err);
        if (err > 1e-4) o.fail(std::string(to_string(pen.kind())) + " gradient off by " + fmt(err));
      }
    }
  }

  // sup_z <z, w> - B(y, z) = Phi(y + w) - Phi(y) in two dimensions, by grid search
  double worst_conj = 0.0;
  for (const auto& pen : penalties) {
    const BregmanLoss loss(pen);
    const Tensor y = pen.project_domain(Tensor::vector({0.4, 0.8}));
    const Tensor w = Tensor::vector({0.3, -0.2});
    double sup = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      sup -= oracle::grid_min_1d(
          [&](double zi) { return -(zi * w[i] - loss.loss(Tensor::vector({y[i]}), Tensor::vector({zi}))); },
          -5, 5, 1e-3);
    }
    const double closed = 0.5 * (squared_norm(y + w) - squared_norm(y)) + pen.eval(y + w) - pen.eval(y);
    worst_conj = std::max(worst_conj, std::abs(sup - closed));
    if (std::abs(sup - closed) > 1e-3) o.fail(std::string(to_string(pen.kind())) + " conjugate off by " + fmt(std::abs(sup - closed)));
  }

  // prox non-expansiveness
  std::size_t pairs = 0;
  for (const auto& pen : penalties) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Tensor a = oracle::random_tensor({4}, rng, -3, 3);
      const Tensor b = oracle::random_tensor({4}, rng, -3, 3);
      if (norm(pen.prox(a) - pen.prox(b)) > norm(a - b) + 1e-12) o.fail(std::string(to_string(pen.kind())) + " prox expands");
      ++pairs;
    }
  }

  const double secs = seconds_since(start);
  if (secs >= 60.0) o.fail("took " + fmt(secs) + " s");
  if (o.pass) {
    o.detail = "adjoint " + fmt(worst_adj) + ", gradient " + fmt(worst_grad) + ", conjugate " + fmt(worst_conj) +
               ", " + std::to_string(pairs) + " prox pairs, " + fmt(secs) + " s";
  }
  return o;
}

// 6 ------------------------------------------------------------------------

Outcome noise_sweep() {
  Outcome o;
  const auto start = Clock::now();
  const ExperimentConfig cfg;
  const fs::path dir = resolve_data_dir(cfg, LBINV_FIXTURE_DIR);
  NoiseSweepParams p = NoiseSweepParams::from_config(cfg);
  const MnistData data = load_mnist(dir, p.cnn.train_images, p.cnn.samples);
  if (data.train.size() < 1000) o.fail("only " + std::to_string(data.train.size()) + " training images in " + dir.string());
  if (p.cnn.train.epochs != 5) o.fail("expected 5 epochs");
  const NoiseSweepResult r = run_noise_sweep(p, data);
  for (const auto& f : r.monotonicity_failures(0.5)) o.fail(f);
  const std::size_t wins = r.inversion_wins_at_lowest();
  if (wins < 4) o.fail("inversion beats the decoder on " + std::to_string(wins) + "/5 digits at the lowest noise");
  const double secs = seconds_since(start);
  if (secs >= 1200.0) o.fail("took " + fmt(secs) + " s");
  std::string curve;
  for (const auto& level : r.levels) curve += fmt(level.psnr_inverted) + " ";
  if (!r.levels.empty()) {
    curve += "dB; decoder " + fmt(r.levels.front().psnr_decoded) + " dB at the lowest noise";
  }
  o.detail = (o.pass ? "" : o.detail + " | ") + "wins " + std::to_string(wins) + "/5, PSNR by level " + curve + ", " +
             fmt(secs) + " s";
  return o;
}

// 7 ------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome format_round_trips() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "lbinv_acceptance";
  fs::create_directories(dir);
  Rng rng(7);

  const Tensor t = oracle::random_tensor({3, 5, 2}, rng);
  save_tensor(dir / "t.lbtf", t);
  const Tensor t2 = load_tensor(dir / "t.lbtf");
  if (!(t2 == t)) o.fail("LBTF values differ");
  save_tensor(dir / "t2.lbtf", t2);
  if (slurp(dir / "t.lbtf") != slurp(dir / "t2.lbtf")) o.fail("LBTF bytes differ on rewrite");

  const auto [enc, dec] = make_conv_autoencoder(3);
  const Network net = enc.then(dec);
  save_network(dir / "m.lbnn", net);
  const Network back = load_network(dir / "m.lbnn");
  bool same = back.depth() == net.depth();
  for (std::size_t l = 0; same && l < net.depth(); ++l) {
    const auto& a = net.layer(l);
    const auto& b = back.layer(l);
    same = a.op.kind() == b.op.kind() && a.op.weight() == b.op.weight() && a.op.bias() == b.op.bias() &&
           a.op.input_shape() == b.op.input_shape() && a.op.output_shape() == b.op.output_shape() &&
           a.penalty == b.penalty;
  }
  if (!same) o.fail("LBNN network differs");
  save_network(dir / "m2.lbnn", back);
  if (slurp(dir / "m.lbnn") != slurp(dir / "m2.lbnn")) o.fail("LBNN bytes differ on rewrite");

  IdxFile idx;
  idx.dims = {4, 3, 5};
  for (std::size_t i = 0; i < 60; ++i) idx.bytes.push_back(static_cast<std::uint8_t>(rng.below(256)));
  write_idx(dir / "x.idx", idx);
  if (!(read_idx(dir / "x.idx") == idx)) o.fail("IDX contents differ");
  write_idx(dir / "x2.idx", read_idx(dir / "x.idx"));
  if (slurp(dir / "x.idx") != slurp(dir / "x2.idx")) o.fail("IDX bytes differ on rewrite");

  fs::remove_all(dir);
  if (o.pass) o.detail = "LBTF, LBNN (6-layer conv autoencoder) and IDX bit-exact";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"rate verification", rate_verification},
      {"circle orderings (seeds 0-4)", circle_orderings},
      {"convex solver oracle equivalence", tikhonov_oracle},
      {"coordinate descent monotonicity", cd_monotonicity},
      {"numerical invariant suite", invariant_suite},
      {"noise sweep behaviour", noise_sweep},
      {"format round-trips", format_round_trips},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    if (!out.pass) ++failures;
    std::printf("%s %zu %s: %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
