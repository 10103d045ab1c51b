#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lbinv/network.hpp"
#include "lbinv/rng.hpp"
#include "lbinv/tensor.hpp"

namespace lbinv {

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
};

/// Per-layer parameter gradients plus the loss they were taken at.
struct Gradients {
  std::vector<Tensor> weight;
  std::vector<Tensor> bias;
  double loss = 0.0;
};

/// Mean squared error averaged over every entry of every sample.
double mean_squared_error(const Network& net, std::span<const Tensor> inputs,
                          std::span<const Tensor> targets);

/// Exact gradients of mean_squared_error by reverse accumulation through the
/// affine maps and activations. The activation derivative at kinks is 0.
Gradients backprop_mse(const Network& net, std::span<const Tensor> inputs,
                       std::span<const Tensor> targets);

struct TrainResult {
  Network encoder;
  Network decoder;
  double initial_mse = 0.0;
  double final_mse = 0.0;
  /// Sample-weighted mean of the minibatch losses in each epoch.
  std::vector<double> epoch_mse;
};

/// Minibatch SGD on the reconstruction error of decoder(encoder(x)) against
/// targets. The sample order is reshuffled every epoch from cfg.seed.
TrainResult train_autoencoder(Network encoder, Network decoder, std::span<const Tensor> inputs,
                              std::span<const Tensor> targets, const TrainConfig& cfg);

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero bias.
LinearOperator random_dense(std::size_t outputs, std::size_t inputs, Rng& rng);

/// Encoder: dense input_dim -> code_dim with ReLU. Decoder: dense code_dim -> input_dim, no activation.
std::pair<Network, Network> make_dense_autoencoder(std::size_t input_dim, std::size_t code_dim,
                                                   std::uint64_t seed);

/// Encoder: 4x4/2 conv 1->8, ReLU; 4x4/2 conv 8->16, ReLU; dense 784->300, ReLU.
/// Decoder: dense 300->784; 4x4/2 transpose conv 16->8, ReLU; 4x4/2 transpose conv 8->1, ReLU.
std::pair<Network, Network> make_conv_autoencoder(std::uint64_t seed);

TrainResult train_dense_autoencoder(std::span<const Tensor> data, std::size_t code_dim,
                                    const TrainConfig& cfg);

/// data: 28 x 28 images (any shape with 784 entries).
TrainResult train_conv_autoencoder(std::span<const Tensor> data, const TrainConfig& cfg);

}  // namespace lbinv
