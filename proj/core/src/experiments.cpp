#include "lbinv/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>

#include "lbinv/bregman.hpp"
#include "lbinv/data_io.hpp"
#include "lbinv/errors.hpp"
#include "lbinv/rng.hpp"
#include "lbinv/serialize.hpp"
#include "lbinv/tv.hpp"

namespace lbinv {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kSide = 28;

std::string fmt(double v) { return format_number(v); }

// Runs body(i) for i in [0, n) on up to `threads` workers; exceptions are rethrown in order.
template <typename Body>
void parallel_for(std::size_t n, std::size_t threads, Body body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

fs::path prepare_out_dir(const ExperimentConfig& cfg, const std::string& fallback) {
  fs::path dir = cfg.get_string("out_dir", fallback);
  fs::create_directories(dir);
  return dir;
}

std::optional<Network> maybe_load_model(const ExperimentConfig& cfg) {
  if (!cfg.has("model")) return std::nullopt;
  return load_network(cfg.get_string("model", ""));
}

TrainConfig train_from_config(const ExperimentConfig& cfg, TrainConfig t) {
  t.learning_rate = cfg.get_double("learning_rate", t.learning_rate);
  t.epochs = cfg.get_size("epochs", t.epochs);
  t.batch_size = cfg.get_size("batch_size", t.batch_size);
  t.seed = cfg.get_u64("seed", t.seed);
  return t;
}

MnistData load_mnist_for(const ExperimentConfig& cfg, std::size_t n_train, std::size_t n_test) {
  return load_mnist(resolve_data_dir(cfg, "data"), n_train, n_test);
}

int report_failures(const std::vector<std::string>& failures) {
  for (const auto& f : failures) std::cerr << "check failed: " << f << '\n';
  return failures.empty() ? 0 : 1;
}

void write_samples(const fs::path& dir, const std::vector<SampleScore>& samples) {
  CsvTable table{{"index", "delta_sq", "psnr_decoded", "psnr_inverted"}, {}};
  for (const auto& s : samples) {
    table.rows.push_back({std::to_string(s.index), fmt(s.delta_sq), fmt(s.psnr_decoded),
                          fmt(s.psnr_inverted)});
    write_pgm(dir / ("sample_" + std::to_string(s.index) + ".pgm"),
              hstack_images({s.truth, s.decoded, s.inverted}));
    std::cout << "sample " << s.index << ": psnr decoded " << fmt(s.psnr_decoded)
              << " dB, inverted " << fmt(s.psnr_inverted) << " dB\n";
  }
  write_csv(dir / "psnr.csv", table);
}

void write_training_log(const fs::path& path, const TrainResult& tr) {
  CsvTable log{{"epoch", "mse"}, {}};
  for (std::size_t e = 0; e < tr.epoch_mse.size(); ++e) {
    log.rows.push_back({std::to_string(e + 1), fmt(tr.epoch_mse[e])});
  }
  write_csv(path, log);
}

const std::vector<Tensor>& sample_source(const MnistData& data, bool validation) {
  const auto& src = validation ? data.test : data.train;
  if (src.empty()) throw ParameterError("no MNIST images available for inversion");
  return src;
}

}  // namespace

// ---------------------------------------------------------------------------

CircleParams CircleParams::from_config(const ExperimentConfig& cfg) {
  CircleParams p;
  p.size = cfg.get_size("size", p.size);
  p.measurements = cfg.get_size("measurements", p.measurements);
  p.radius_frac = cfg.get_double("radius_frac", p.radius_frac);
  p.noise_std = cfg.get_double("noise_std", p.noise_std);
  p.alpha = cfg.get_double("alpha", p.alpha);
  p.max_iters = cfg.get_size("max_iters", p.max_iters);
  p.landweber_iters = cfg.get_size("landweber_iters", p.landweber_iters);
  p.stop_tol = cfg.get_double("stop_tol", p.stop_tol);
  p.tau_disc = cfg.get_double("tau_disc", p.tau_disc);
  p.seed = cfg.get_u64("seed", p.seed);
  return p;
}

std::vector<std::string> CircleResult::ordering_failures() const {
  std::vector<std::string> out;
  if (!(tv_tv < tv_truth)) {
    out.push_back("tv(TV) = " + fmt(tv_tv) + " is not below tv(truth) = " + fmt(tv_truth));
  }
  if (!(tv_truth < tv_landweber)) {
    out.push_back("tv(truth) = " + fmt(tv_truth) + " is not below tv(Landweber) = " +
                  fmt(tv_landweber));
  }
  if (!(std::abs(l2_tv - l2_truth) < std::abs(l2_landweber - l2_truth))) {
    out.push_back("l2(TV) = " + fmt(l2_tv) + " is not closer to l2(truth) = " + fmt(l2_truth) +
                  " than l2(Landweber) = " + fmt(l2_landweber));
  }
  return out;
}

Layer random_relu_layer(std::size_t outputs, std::size_t inputs, std::uint64_t seed) {
  Rng rng(seed);
  LinearOperator op = random_dense(outputs, inputs, rng);
  const double bound = 1.0 / std::sqrt(static_cast<double>(inputs));
  Tensor b({outputs});
  for (double& v : b.values()) v = rng.uniform(-bound, bound);
  return Layer{LinearOperator::dense(op.weight(), std::move(b)), ProxPenalty::relu()};
}

CircleResult run_circle(const CircleParams& p) {
  CircleResult r;
  r.truth = circle_phantom(p.size, p.size, p.radius_frac);
  const Layer layer = random_relu_layer(p.measurements, p.size * p.size, p.seed);
  const Tensor y = layer.forward(r.truth);
  const NoisyData noisy = add_noise(y, NoiseSpec{p.noise_std, p.seed + 1, true}, layer.penalty);
  r.delta = norm(noisy.y_delta - y);

  const double lipschitz = operator_norm_sq(layer.op);
  LandweberResult lw =
      landweber_invert(layer, noisy.y_delta, r.delta, p.tau_disc, 1.0 / lipschitz, p.landweber_iters);
  r.landweber = lw.x.reshaped({p.size, p.size});
  r.landweber_report = std::move(lw.report);

  const Regulariser reg = Regulariser::total_variation(p.size, p.size);
  const PdhgConfig cfg =
      PdhgConfig::standard(p.alpha, lipschitz, reg.k_norm_sq(), p.max_iters, p.stop_tol);
  PdhgResult tv = pdhg_invert_perceptron(layer, noisy.y_delta, reg, cfg, Tensor({p.size, p.size}));
  r.tv = std::move(tv.x);
  r.tv_report = std::move(tv.report);

  r.tv_truth = tv_norm(r.truth);
  r.tv_landweber = tv_norm(r.landweber);
  r.tv_tv = tv_norm(r.tv);
  r.l2_truth = norm(r.truth);
  r.l2_landweber = norm(r.landweber);
  r.l2_tv = norm(r.tv);
  return r;
}

// ---------------------------------------------------------------------------

MnistData load_mnist(const fs::path& dir, std::size_t n_train, std::size_t n_test) {
  MnistData data;
  auto take = [&](const char* name, std::size_t n) {
    if (n == 0) return std::vector<Tensor>{};
    std::vector<Tensor> images = load_idx_images(dir / name);
    if (images.size() < n) {
      throw ParameterError(std::string(name) + " holds " + std::to_string(images.size()) +
                           " images, " + std::to_string(n) + " requested");
    }
    images.resize(n);
    return images;
  };
  data.train = take("train-images-idx3-ubyte", n_train);
  data.test = take("t10k-images-idx3-ubyte", n_test);
  return data;
}

fs::path resolve_data_dir(const ExperimentConfig& cfg, const fs::path& fallback) {
  if (cfg.has("data_dir")) return cfg.get_string("data_dir", "");
  if (const char* env = std::getenv("LB_DATA_DIR"); env && *env) return env;
  return fallback;
}

std::pair<Network, Network> split_autoencoder(const Network& net) {
  if (net.depth() < 2 || net.depth() % 2 != 0) {
    throw ConstructionError("autoencoder archive needs an even number of layers, got " +
                            std::to_string(net.depth()));
  }
  const auto& layers = net.layers();
  const auto mid = layers.begin() + static_cast<std::ptrdiff_t>(net.depth() / 2);
  return {Network(std::vector<Layer>(layers.begin(), mid)),
          Network(std::vector<Layer>(mid, layers.end()))};
}

MnistPerceptronParams MnistPerceptronParams::from_config(const ExperimentConfig& cfg) {
  MnistPerceptronParams p;
  p.code_dim = cfg.get_size("code_dim", p.code_dim);
  p.train_images = cfg.get_size("train_images", p.train_images);
  p.train = train_from_config(cfg, p.train);
  p.samples = cfg.get_size("samples", p.samples);
  p.validation = cfg.get_bool("validation", p.validation);
  p.alpha = cfg.get_double("alpha", p.validation ? 5e-2 : p.alpha);
  p.noise_std = cfg.get_double("noise_std", p.noise_std);
  p.max_iters = cfg.get_size("max_iters", p.max_iters);
  p.stop_tol = cfg.get_double("stop_tol", p.stop_tol);
  p.seed = cfg.get_u64("seed", p.seed);
  return p;
}

MnistPerceptronResult run_mnist_perceptron(const MnistPerceptronParams& p, const MnistData& data,
                                           const std::optional<Network>& model) {
  if (data.train.empty()) throw ParameterError("no MNIST training images");
  const std::size_t n_train = std::min(p.train_images, data.train.size());
  std::vector<Tensor> train(data.train.begin(), data.train.begin() + static_cast<std::ptrdiff_t>(n_train));

  MnistPerceptronResult r;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& img : train) {
    for (double v : img.values()) sum += v;
    count += img.size();
  }
  r.mean = sum / static_cast<double>(count);
  for (auto& img : train) {
    for (double& v : img.values()) v -= r.mean;
  }

  if (model) {
    std::tie(r.encoder, r.decoder) = split_autoencoder(*model);
  } else {
    r.training = train_dense_autoencoder(train, p.code_dim, p.train);
    r.encoder = r.training.encoder;
    r.decoder = r.training.decoder;
  }
  if (r.encoder.depth() != 1) throw ConstructionError("perceptron inversion needs a one-layer encoder");
  const Layer& layer = r.encoder.layer(0);

  const Regulariser reg = Regulariser::total_variation(kSide, kSide);
  const PdhgConfig cfg = PdhgConfig::standard(p.alpha, operator_norm_sq(layer.op), reg.k_norm_sq(),
                                              p.max_iters, p.stop_tol);
  const auto& source = sample_source(data, p.validation);
  for (std::size_t k = 0; k < std::min(p.samples, source.size()); ++k) {
    SampleScore s;
    s.index = k;
    s.truth = source[k].reshaped({kSide, kSide});
    Tensor centred = s.truth;
    for (double& v : centred.values()) v -= r.mean;
    const Tensor pre = layer.op.forward(centred);
    const NoisyData noisy = add_noise(layer.penalty.prox(pre),
                                      NoiseSpec{p.noise_std, p.seed + 1 + k, true}, layer.penalty, pre);
    s.delta_sq = noisy.delta_sq;

    s.decoded = net_forward(r.decoder, noisy.y_delta).reshaped({kSide, kSide});
    PdhgResult inv = pdhg_invert_perceptron(layer, noisy.y_delta, reg, cfg, Tensor({kSide, kSide}));
    s.inverted = std::move(inv.x);
    for (double& v : s.decoded.values()) v += r.mean;
    for (double& v : s.inverted.values()) v += r.mean;
    s.psnr_decoded = psnr(s.decoded, s.truth);
    s.psnr_inverted = psnr(s.inverted, s.truth);
    r.samples.push_back(std::move(s));
  }
  return r;
}

MnistCnnParams MnistCnnParams::from_config(const ExperimentConfig& cfg) {
  MnistCnnParams p;
  p.train_images = cfg.get_size("train_images", p.train_images);
  p.train = train_from_config(cfg, p.train);
  p.samples = cfg.get_size("samples", p.samples);
  p.validation = cfg.get_bool("validation", p.validation);
  p.alpha = cfg.get_double("alpha", p.alpha);
  p.noise_std = cfg.get_double("noise_std", p.noise_std);
  p.outer_iters = cfg.get_size("outer_iters", cfg.get_size("max_iters", p.outer_iters));
  p.inner_iters = cfg.get_size("inner_iters", p.inner_iters);
  p.stop_tol = cfg.get_double("stop_tol", p.stop_tol);
  p.seed = cfg.get_u64("seed", p.seed);
  return p;
}

CoordinateDescentConfig cnn_solver_config(const Network& encoder, double alpha,
                                          std::size_t outer_iters, std::size_t inner_iters,
                                          double stop_tol) {
  CoordinateDescentConfig cfg = CoordinateDescentConfig::standard(
      encoder, Regulariser::total_variation(kSide, kSide), alpha, outer_iters);
  cfg.inner_iters = inner_iters;
  cfg.stop_tol = stop_tol;
  return cfg;
}

SampleScore invert_cnn_sample(const Network& encoder, const Network& decoder, const Tensor& image,
                              double noise_std, std::uint64_t noise_seed,
                              const CoordinateDescentConfig& cfg) {
  SampleScore s;
  s.truth = image.reshaped({kSide, kSide});
  const Tensor x = image.reshaped(encoder.input_shape());
  std::vector<Tensor> states = hidden_states(encoder, x);
  const Layer& last = encoder.layers().back();
  const Tensor pre = last.op.forward(encoder.depth() > 1 ? states[states.size() - 2] : x);
  const NoisyData noisy =
      add_noise(states.back(), NoiseSpec{noise_std, noise_seed, true}, last.penalty, pre);
  s.delta_sq = noisy.delta_sq;
  s.decoded = net_forward(decoder, noisy.y_delta).reshaped({kSide, kSide});

  const Regulariser reg = Regulariser::total_variation(kSide, kSide);
  CoordinateDescentResult inv =
      coordinate_descent_invert(encoder, noisy.y_delta, reg, cfg, Tensor(encoder.input_shape()));
  s.inverted = inv.x0.reshaped({kSide, kSide});
  s.psnr_decoded = psnr(s.decoded, s.truth);
  s.psnr_inverted = psnr(s.inverted, s.truth);
  return s;
}

namespace {

MnistCnnResult prepare_cnn(const MnistCnnParams& p, const MnistData& data,
                           const std::optional<Network>& model) {
  MnistCnnResult r;
  if (model) {
    std::tie(r.encoder, r.decoder) = split_autoencoder(*model);
    return r;
  }
  if (data.train.empty()) throw ParameterError("no MNIST training images");
  const std::size_t n = std::min(p.train_images, data.train.size());
  std::vector<Tensor> train;
  train.reserve(n);
  for (std::size_t k = 0; k < n; ++k) train.push_back(data.train[k].reshaped({1, kSide, kSide}));
  r.training = train_conv_autoencoder(train, p.train);
  r.encoder = r.training.encoder;
  r.decoder = r.training.decoder;
  return r;
}

}  // namespace

MnistCnnResult run_mnist_cnn(const MnistCnnParams& p, const MnistData& data,
                             const std::optional<Network>& model) {
  MnistCnnResult r = prepare_cnn(p, data, model);
  const auto& source = sample_source(data, p.validation);
  const CoordinateDescentConfig cfg =
      cnn_solver_config(r.encoder, p.alpha, p.outer_iters, p.inner_iters, p.stop_tol);
  for (std::size_t k = 0; k < std::min(p.samples, source.size()); ++k) {
    SampleScore s = invert_cnn_sample(r.encoder, r.decoder, source[k], p.noise_std, p.seed + 1 + k, cfg);
    s.index = k;
    r.samples.push_back(std::move(s));
  }
  return r;
}

// ---------------------------------------------------------------------------

NoiseSweepParams NoiseSweepParams::from_config(const ExperimentConfig& cfg) {
  NoiseSweepParams p;
  ExperimentConfig defaults;
  if (!cfg.has("max_iters")) defaults.set("outer_iters", "400");
  defaults.merge(cfg);
  p.cnn = MnistCnnParams::from_config(defaults);
  p.levels = cfg.get_size("noise_levels", p.levels);
  p.max_noise_std = cfg.get_double("max_noise_std", p.max_noise_std);
  p.alpha_grid = cfg.get_grid("alpha_grid", p.alpha_grid);
  p.threads = cfg.get_size("threads", p.threads);
  return p;
}

std::vector<std::string> NoiseSweepResult::monotonicity_failures(double slack_db) const {
  std::vector<std::string> out;
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (levels[k].psnr_inverted > levels[k - 1].psnr_inverted + slack_db) {
      out.push_back("inverted PSNR rises from " + fmt(levels[k - 1].psnr_inverted) + " dB at delta^2 = " +
                    fmt(levels[k - 1].delta_sq) + " to " + fmt(levels[k].psnr_inverted) +
                    " dB at delta^2 = " + fmt(levels[k].delta_sq));
    }
  }
  return out;
}

std::size_t NoiseSweepResult::inversion_wins_at_lowest() const {
  if (levels.empty()) return 0;
  const NoiseLevel& low = levels.front();
  std::size_t wins = 0;
  for (std::size_t s = 0; s < low.sample_psnr_inverted.size(); ++s) {
    if (low.sample_psnr_inverted[s] > low.sample_psnr_decoded[s]) ++wins;
  }
  return wins;
}

NoiseSweepResult run_noise_sweep(const NoiseSweepParams& p, const MnistData& data,
                                 const std::optional<Network>& model) {
  if (p.levels == 0) throw ParameterError("noise sweep needs at least one level");
  const std::vector<double> alphas =
      p.alpha_grid.empty() ? parse_grid("1e-4:1e-2:geometric:10") : p.alpha_grid;

  NoiseSweepResult result;
  result.model = prepare_cnn(p.cnn, data, model);
  const auto& source = sample_source(data, p.cnn.validation);
  const std::size_t samples = std::min(p.cnn.samples, source.size());
  const std::size_t tasks = p.levels * alphas.size();
  std::vector<CoordinateDescentConfig> solver;
  solver.push_back(cnn_solver_config(result.model.encoder, alphas.front(), p.cnn.outer_iters,
                                     p.cnn.inner_iters, p.cnn.stop_tol));
  const double first_norm_sq = operator_norm_sq(result.model.encoder.layer(0).op);
  for (std::size_t a = 1; a < alphas.size(); ++a) {
    // Only the x_0 steps depend on alpha; the hidden-layer norms are reused.
    CoordinateDescentConfig c = solver.front();
    const PdhgConfig inner = PdhgConfig::standard(alphas[a], first_norm_sq, kGradientNormSqBound);
    c.alpha = alphas[a];
    c.tau_x0 = inner.tau_x;
    c.tau_z = inner.tau_z;
    solver.push_back(c);
  }

  // Common random numbers: sample k uses the same noise direction at every level.
  std::vector<std::vector<SampleScore>> scores(tasks);
  parallel_for(tasks, p.threads, [&](std::size_t t) {
    const std::size_t level = t / alphas.size();
    const double std_dev = p.levels == 1 ? p.max_noise_std
                                         : p.max_noise_std * static_cast<double>(level) /
                                               static_cast<double>(p.levels - 1);
    for (std::size_t k = 0; k < samples; ++k) {
      scores[t].push_back(invert_cnn_sample(result.model.encoder, result.model.decoder, source[k],
                                            std_dev, p.cnn.seed + 1 + k, solver[t % alphas.size()]));
    }
  });

  for (std::size_t level = 0; level < p.levels; ++level) {
    NoiseLevel row;
    row.noise_std = p.levels == 1 ? p.max_noise_std
                                  : p.max_noise_std * static_cast<double>(level) /
                                        static_cast<double>(p.levels - 1);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const auto& s = scores[level * alphas.size() + a];
      double mean = 0.0;
      for (const auto& x : s) mean += x.psnr_inverted / static_cast<double>(samples);
      if (mean > best) {
        best = mean;
        row.best_alpha = alphas[a];
        row.psnr_inverted = mean;
        row.sample_psnr_inverted.clear();
        row.sample_psnr_decoded.clear();
        row.delta_sq = row.psnr_decoded = 0.0;
        for (const auto& x : s) {
          row.sample_psnr_inverted.push_back(x.psnr_inverted);
          row.sample_psnr_decoded.push_back(x.psnr_decoded);
          row.delta_sq += x.delta_sq / static_cast<double>(samples);
          row.psnr_decoded += x.psnr_decoded / static_cast<double>(samples);
        }
      }
    }
    result.levels.push_back(std::move(row));
  }
  std::stable_sort(result.levels.begin(), result.levels.end(),
                   [](const NoiseLevel& a, const NoiseLevel& b) { return a.delta_sq < b.delta_sq; });
  return result;
}

// ---------------------------------------------------------------------------

RateProblem make_rate_problem(std::uint64_t seed, std::size_t outputs, std::size_t inputs) {
  if (outputs == 0 || inputs == 0) throw ParameterError("rate problem dimensions must be positive");
  Rng rng(seed);
  Tensor w({outputs, inputs});
  const double scale = 1.0 / std::sqrt(static_cast<double>(inputs));
  for (double& v : w.values()) v = scale * rng.normal();
  Tensor v_dag({outputs});
  for (double& v : v_dag.values()) v = rng.normal();

  const LinearOperator linear = LinearOperator::dense(w, Tensor({outputs}));
  const Tensor wx = linear.forward(linear.adjoint_apply(v_dag));
  Tensor b({outputs});
  for (std::size_t i = 0; i < outputs; ++i) b[i] = rng.uniform(1.0, 2.0) - wx[i];
  return RateProblem{Layer{LinearOperator::dense(std::move(w), std::move(b)), ProxPenalty::relu()},
                     std::move(v_dag)};
}

// ---------------------------------------------------------------------------

int cmd_circle(const ExperimentConfig& cfg) {
  const CircleParams p = CircleParams::from_config(cfg);
  const fs::path dir = prepare_out_dir(cfg, "out/circle");
  const CircleResult r = run_circle(p);

  write_pgm(dir / "truth.pgm", r.truth);
  write_pgm(dir / "landweber.pgm", r.landweber);
  write_pgm(dir / "tv.pgm", r.tv);
  write_csv(dir / "metrics.csv",
            CsvTable{{"image", "l2", "tv", "iterations", "stop"},
                     {{"truth", fmt(r.l2_truth), fmt(r.tv_truth), "0", "-"},
                      {"landweber", fmt(r.l2_landweber), fmt(r.tv_landweber),
                       std::to_string(r.landweber_report.iterations),
                       to_string(r.landweber_report.stop_reason)},
                      {"tv", fmt(r.l2_tv), fmt(r.tv_tv), std::to_string(r.tv_report.iterations),
                       to_string(r.tv_report.stop_reason)}}});
  std::cout << "delta " << fmt(r.delta) << "\n"
            << "truth      l2 " << fmt(r.l2_truth) << "  tv " << fmt(r.tv_truth) << "\n"
            << "landweber  l2 " << fmt(r.l2_landweber) << "  tv " << fmt(r.tv_landweber) << "  ("
            << r.landweber_report.iterations << " iterations)\n"
            << "tv-pdhg    l2 " << fmt(r.l2_tv) << "  tv " << fmt(r.tv_tv) << "  ("
            << r.tv_report.iterations << " iterations)\n";
  return report_failures(r.ordering_failures());
}

int cmd_mnist_perceptron(const ExperimentConfig& cfg) {
  const MnistPerceptronParams p = MnistPerceptronParams::from_config(cfg);
  const fs::path dir = prepare_out_dir(cfg, "out/mnist-perceptron");
  const MnistData data = load_mnist_for(cfg, p.train_images, p.validation ? p.samples : 0);
  const MnistPerceptronResult r = run_mnist_perceptron(p, data, maybe_load_model(cfg));
  if (!r.training.epoch_mse.empty()) {
    write_training_log(dir / "training_log.csv", r.training);
    save_network(dir / "model.lbnn", r.encoder.then(r.decoder));
  }
  write_samples(dir, r.samples);
  return 0;
}

int cmd_mnist_cnn(const ExperimentConfig& cfg) {
  const MnistCnnParams p = MnistCnnParams::from_config(cfg);
  const fs::path dir = prepare_out_dir(cfg, "out/mnist-cnn");
  const MnistData data = load_mnist_for(cfg, p.train_images, p.validation ? p.samples : 0);
  const MnistCnnResult r = run_mnist_cnn(p, data, maybe_load_model(cfg));
  if (!r.training.epoch_mse.empty()) {
    write_training_log(dir / "training_log.csv", r.training);
    save_network(dir / "model.lbnn", r.encoder.then(r.decoder));
  }
  write_samples(dir, r.samples);
  return 0;
}

int cmd_noise_sweep(const ExperimentConfig& cfg) {
  const NoiseSweepParams p = NoiseSweepParams::from_config(cfg);
  const fs::path dir = prepare_out_dir(cfg, "out/noise-sweep");
  const MnistData data =
      load_mnist_for(cfg, p.cnn.train_images, p.cnn.validation ? p.cnn.samples : 0);
  const NoiseSweepResult r = run_noise_sweep(p, data, maybe_load_model(cfg));

  CsvTable table{{"delta_sq", "best_alpha", "psnr_inverted", "psnr_decoded"}, {}};
  for (const auto& l : r.levels) {
    table.rows.push_back({fmt(l.delta_sq), fmt(l.best_alpha), fmt(l.psnr_inverted), fmt(l.psnr_decoded)});
    std::cout << "delta^2 " << fmt(l.delta_sq) << "  alpha " << fmt(l.best_alpha) << "  inverted "
              << fmt(l.psnr_inverted) << " dB  decoded " << fmt(l.psnr_decoded) << " dB\n";
  }
  write_csv(dir / "noise_sweep.csv", table);
  if (!r.model.training.epoch_mse.empty()) write_training_log(dir / "training_log.csv", r.model.training);
  return report_failures(r.monotonicity_failures());
}

int cmd_rate(const ExperimentConfig& cfg) {
  RateConfig rc;
  rc.c = cfg.get_double("c", 1.0);
  rc.deltas = cfg.get_grid("deltas", parse_grid("1e-1:1e-4:geometric:7"));
  rc.seed = cfg.get_u64("seed", 0);
  rc.max_iters = cfg.get_size("max_iters", rc.max_iters);
  rc.stop_tol = cfg.get_double("stop_tol", rc.stop_tol);
  const fs::path dir = prepare_out_dir(cfg, "out/rate");

  const RateProblem problem = make_rate_problem(rc.seed);
  const RateTable table = rate_experiment(problem.layer, problem.v_dag, rc);
  {
    std::ofstream out(dir / "rate.csv");
    write_rate_csv(out, table);
    if (!out) throw FormatError("write failed: " + (dir / "rate.csv").string());
  }
  std::vector<std::string> failures;
  for (const auto& row : table.rows) {
    std::cout << "delta " << fmt(row.delta) << "  alpha " << fmt(row.alpha) << "  d_sym "
              << fmt(row.d_sym) << "  bound " << fmt(row.bound) << (row.satisfied() ? "" : "  VIOLATED")
              << '\n';
    if (!row.satisfied()) {
      failures.push_back("d_sym " + fmt(row.d_sym) + " exceeds bound " + fmt(row.bound) +
                         " at delta " + fmt(row.delta));
    }
  }
  std::cout << "log-log slope " << fmt(table.loglog_slope) << '\n';
  return report_failures(failures);
}

int cmd_train(const ExperimentConfig& cfg) {
  const std::string arch = cfg.get_string("architecture", "conv");
  if (arch != "dense" && arch != "conv") {
    throw ParameterError("architecture must be dense or conv, got '" + arch + "'");
  }
  const fs::path dir = prepare_out_dir(cfg, "out/train");
  TrainResult tr;
  if (arch == "dense") {
    const MnistPerceptronParams p = MnistPerceptronParams::from_config(cfg);
    MnistPerceptronParams only_train = p;
    only_train.samples = 0;
    const MnistData data = load_mnist_for(cfg, p.train_images, 0);
    tr = run_mnist_perceptron(only_train, MnistData{data.train, data.train}, std::nullopt).training;
  } else {
    const MnistCnnParams p = MnistCnnParams::from_config(cfg);
    const MnistData data = load_mnist_for(cfg, p.train_images, 0);
    tr = prepare_cnn(p, data, std::nullopt).training;
  }
  save_network(dir / "model.lbnn", tr.encoder.then(tr.decoder));
  write_training_log(dir / "training_log.csv", tr);
  std::cout << "mse " << fmt(tr.initial_mse) << " -> " << fmt(tr.final_mse) << " after "
            << tr.epoch_mse.size() << " epochs\n";
  return tr.final_mse < tr.initial_mse ? 0 : report_failures({"training did not reduce the MSE"});
}

}  // namespace lbinv
