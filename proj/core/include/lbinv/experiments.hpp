#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lbinv/config.hpp"
#include "lbinv/network.hpp"
#include "lbinv/solvers.hpp"
#include "lbinv/tensor.hpp"
#include "lbinv/training.hpp"

namespace lbinv {

// ---------------------------------------------------------------------------
// Circle phantom: Landweber with discrepancy stopping against TV-PDHG
// ---------------------------------------------------------------------------

struct CircleParams {
  std::size_t size = 64;
  std::size_t measurements = 512;
  double radius_frac = 0.25;
  double noise_std = 0.005;
  double alpha = 1.5e-2;
  std::size_t max_iters = 10000;
  std::size_t landweber_iters = 10000;
  double stop_tol = 1e-5;
  double tau_disc = 1.0;
  std::uint64_t seed = 0;

  static CircleParams from_config(const ExperimentConfig& cfg);
};

struct CircleResult {
  Tensor truth;
  Tensor landweber;
  Tensor tv;
  double delta = 0.0;
  double tv_truth = 0.0, tv_landweber = 0.0, tv_tv = 0.0;
  double l2_truth = 0.0, l2_landweber = 0.0, l2_tv = 0.0;
  SolveReport landweber_report;
  SolveReport tv_report;

  /// Empty when tv(TV) < tv(truth) < tv(Landweber) and the TV norm is the closer one.
  std::vector<std::string> ordering_failures() const;
};

/// Random ReLU layer W x + b with entries uniform in +-1/sqrt(inputs).
Layer random_relu_layer(std::size_t outputs, std::size_t inputs, std::uint64_t seed);

CircleResult run_circle(const CircleParams& p);

// ---------------------------------------------------------------------------
// MNIST
// ---------------------------------------------------------------------------

struct MnistData {
  std::vector<Tensor> train;
  std::vector<Tensor> test;
};

/// Reads train-images-idx3-ubyte and t10k-images-idx3-ubyte from dir, keeping
/// the first n_train / n_test images.
MnistData load_mnist(const std::filesystem::path& dir, std::size_t n_train, std::size_t n_test);

/// data_dir config key, else $LB_DATA_DIR, else fallback.
std::filesystem::path resolve_data_dir(const ExperimentConfig& cfg,
                                       const std::filesystem::path& fallback);

/// Splits an autoencoder archive into encoder (first half of the layers) and decoder.
std::pair<Network, Network> split_autoencoder(const Network& net);

struct SampleScore {
  std::size_t index = 0;
  double delta_sq = 0.0;
  double psnr_decoded = 0.0;
  double psnr_inverted = 0.0;
  Tensor truth;
  Tensor decoded;
  Tensor inverted;
};

struct MnistPerceptronParams {
  std::size_t code_dim = 100;
  std::size_t train_images = 1000;
  TrainConfig train{0.05, 20, 10, 0};
  std::size_t samples = 5;
  bool validation = false;
  double alpha = 5e-3;
  double noise_std = 0.0;
  std::size_t max_iters = 10000;
  double stop_tol = 1e-5;
  std::uint64_t seed = 0;

  static MnistPerceptronParams from_config(const ExperimentConfig& cfg);
};

struct MnistPerceptronResult {
  Network encoder;
  Network decoder;
  double mean = 0.0;
  TrainResult training;
  std::vector<SampleScore> samples;
};

/// Trains the dense autoencoder on mean-centred images unless a model is
/// given, then inverts the (noisy) codes with TV-PDHG.
MnistPerceptronResult run_mnist_perceptron(const MnistPerceptronParams& p, const MnistData& data,
                                           const std::optional<Network>& model = std::nullopt);

struct MnistCnnParams {
  std::size_t train_images = 1000;
  TrainConfig train{0.2, 5, 2, 0};
  std::size_t samples = 5;
  bool validation = false;
  double alpha = 9e-3;
  double noise_std = 0.0;
  std::size_t outer_iters = 1500;
  std::size_t inner_iters = 50;
  double stop_tol = 1e-6;
  std::uint64_t seed = 0;

  static MnistCnnParams from_config(const ExperimentConfig& cfg);
};

struct MnistCnnResult {
  Network encoder;
  Network decoder;
  TrainResult training;
  std::vector<SampleScore> samples;
};

/// Inverts an encoder output by coordinate descent with a TV prior on the image;
/// cfg comes from CoordinateDescentConfig::standard on the encoder.
SampleScore invert_cnn_sample(const Network& encoder, const Network& decoder, const Tensor& image,
                              double noise_std, std::uint64_t noise_seed,
                              const CoordinateDescentConfig& cfg);

/// Standard coordinate-descent steps for a 28 x 28 TV prior.
CoordinateDescentConfig cnn_solver_config(const Network& encoder, double alpha,
                                          std::size_t outer_iters, std::size_t inner_iters,
                                          double stop_tol);

MnistCnnResult run_mnist_cnn(const MnistCnnParams& p, const MnistData& data,
                             const std::optional<Network>& model = std::nullopt);

// ---------------------------------------------------------------------------
// Noise sweep
// ---------------------------------------------------------------------------

struct NoiseSweepParams {
  /// Training and inversion settings; outer_iters defaults to 400 here.
  MnistCnnParams cnn;
  std::size_t levels = 8;
  double max_noise_std = 0.33;
  std::vector<double> alpha_grid;  // empty: 10 log-spaced points in [1e-4, 1e-2]
  std::size_t threads = 0;         // 0: hardware concurrency

  static NoiseSweepParams from_config(const ExperimentConfig& cfg);
};

struct NoiseLevel {
  double noise_std = 0.0;
  double delta_sq = 0.0;  // mean over samples
  double best_alpha = 0.0;
  double psnr_inverted = 0.0;  // mean over samples at best_alpha
  double psnr_decoded = 0.0;
  std::vector<double> sample_psnr_inverted;
  std::vector<double> sample_psnr_decoded;
};

struct NoiseSweepResult {
  MnistCnnResult model;
  std::vector<NoiseLevel> levels;  // sorted by delta_sq

  /// Empty when psnr_inverted is non-increasing in delta_sq up to slack_db.
  std::vector<std::string> monotonicity_failures(double slack_db = 0.5) const;
  /// Samples at the lowest noise level whose inversion beats the decoder.
  std::size_t inversion_wins_at_lowest() const;
};

NoiseSweepResult run_noise_sweep(const NoiseSweepParams& p, const MnistData& data,
                                 const std::optional<Network>& model = std::nullopt);

// ---------------------------------------------------------------------------
// Convergence rate
// ---------------------------------------------------------------------------

struct RateProblem {
  Layer layer;
  Tensor v_dag;
};

/// 8 x 32 ReLU layer with Gaussian W / sqrt(32) and a Gaussian source element;
/// b is set so that W x_dag + b lies in [1, 2] for x_dag = W^T v_dag.
RateProblem make_rate_problem(std::uint64_t seed, std::size_t outputs = 8, std::size_t inputs = 32);

// ---------------------------------------------------------------------------
// Commands: write artifacts into out_dir, return the process exit code
// (0 when every in-command check passes, 1 otherwise).
// ---------------------------------------------------------------------------

int cmd_circle(const ExperimentConfig& cfg);
int cmd_mnist_perceptron(const ExperimentConfig& cfg);
int cmd_mnist_cnn(const ExperimentConfig& cfg);
int cmd_noise_sweep(const ExperimentConfig& cfg);
int cmd_rate(const ExperimentConfig& cfg);
int cmd_train(const ExperimentConfig& cfg);

}  // namespace lbinv
