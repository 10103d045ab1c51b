#include "lbinv/training.hpp"

#include <cmath>
#include <numeric>

#include "lbinv/errors.hpp"
#include "lbinv/rng.hpp"

namespace lbinv {

namespace {

void check_dataset(const Network& net, std::span<const Tensor> inputs,
                   std::span<const Tensor> targets) {
  if (inputs.empty()) throw ParameterError("empty dataset");
  if (inputs.size() != targets.size()) throw DimensionError("inputs and targets differ in count");
  if (net.empty()) throw DimensionError("empty network");
  const std::size_t in = net.layer(0).op.input_size();
  const std::size_t out = net.layers().back().op.output_size();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != in || targets[i].size() != out) {
      throw DimensionError("sample " + std::to_string(i) + " does not match the network shapes");
    }
  }
}

// Accumulates gradients of sum |net(x) - t|^2 * scale for one sample; returns the squared error.
double accumulate_sample(const Network& net, const Tensor& x, const Tensor& target, double scale,
                         Gradients& grads) {
  const std::size_t depth = net.depth();
  std::vector<Tensor> inputs;
  std::vector<Tensor> pre;
  inputs.reserve(depth);
  pre.reserve(depth);
  inputs.push_back(x.reshaped(net.layer(0).op.input_shape()));
  for (std::size_t l = 0; l < depth; ++l) {
    const Layer& layer = net.layer(l);
    pre.push_back(layer.op.forward(inputs.back()));
    Tensor post = layer.penalty.prox(pre.back());
    if (l + 1 < depth) inputs.push_back(post.reshaped(net.layer(l + 1).op.input_shape()));
    else inputs.push_back(std::move(post));
  }

  const Tensor& output = inputs.back();
  Tensor upstream(output.shape());
  double sq = 0.0;
  for (std::size_t i = 0; i < output.size(); ++i) {
    const double d = output[i] - target[i];
    sq += d * d;
    upstream[i] = 2.0 * scale * d;
  }

  for (std::size_t l = depth; l-- > 0;) {
    const Layer& layer = net.layer(l);
    for (std::size_t i = 0; i < upstream.size(); ++i) {
      upstream[i] *= layer.penalty.prox_derivative(pre[l][i]);
    }
    layer.op.accumulate_parameter_gradients(inputs[l], upstream, grads.weight[l], grads.bias[l]);
    if (l > 0) upstream = layer.op.adjoint_apply(upstream);
  }
  return sq;
}

Gradients zero_gradients(const Network& net) {
  Gradients g;
  for (const auto& layer : net.layers()) {
    g.weight.emplace_back(layer.op.weight().shape());
    g.bias.emplace_back(layer.op.bias().shape());
  }
  return g;
}

LinearOperator random_conv(std::size_t out_c, std::size_t in_c, std::size_t k, std::size_t stride,
                           std::size_t height, std::size_t width, bool transpose, Rng& rng) {
  Tensor kernel(transpose ? Shape{in_c, out_c, k, k} : Shape{out_c, in_c, k, k});
  const double bound = 1.0 / std::sqrt(static_cast<double>(kernel.dim(1) * k * k));
  for (double& w : kernel.values()) w = rng.uniform(-bound, bound);
  Tensor bias({out_c});
  const std::size_t pad = LinearOperator::default_padding(k, stride);
  return transpose ? LinearOperator::conv_transpose2d(std::move(kernel), std::move(bias), stride,
                                                      pad, height, width)
                   : LinearOperator::conv2d(std::move(kernel), std::move(bias), stride, pad,
                                            height, width);
}

}  // namespace

double mean_squared_error(const Network& net, std::span<const Tensor> inputs,
                          std::span<const Tensor> targets) {
  check_dataset(net, inputs, targets);
  double sq = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Tensor out = net_forward(net, inputs[i].reshaped(net.input_shape()));
    for (std::size_t j = 0; j < out.size(); ++j) {
      const double d = out[j] - targets[i][j];
      sq += d * d;
    }
    count += out.size();
  }
  return sq / static_cast<double>(count);
}

Gradients backprop_mse(const Network& net, std::span<const Tensor> inputs,
                       std::span<const Tensor> targets) {
  check_dataset(net, inputs, targets);
  Gradients grads = zero_gradients(net);
  const double entries =
      static_cast<double>(inputs.size() * net.layers().back().op.output_size());
  double sq = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    sq += accumulate_sample(net, inputs[i], targets[i], 1.0 / entries, grads);
  }
  grads.loss = sq / entries;
  return grads;
}

TrainResult train_autoencoder(Network encoder, Network decoder, std::span<const Tensor> inputs,
                              std::span<const Tensor> targets, const TrainConfig& cfg) {
  if (!(cfg.learning_rate >= 0.0)) throw ParameterError("learning rate must be non-negative");
  if (cfg.epochs == 0 || cfg.batch_size == 0) throw ParameterError("epochs and batch size must be positive");
  Network net = encoder.then(decoder);
  check_dataset(net, inputs, targets);

  TrainResult result;
  result.initial_mse = mean_squared_error(net, inputs, targets);

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Tensor> batch_in, batch_out;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    double weighted = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      batch_in.clear();
      batch_out.clear();
      for (std::size_t i = begin; i < end; ++i) {
        batch_in.push_back(inputs[order[i]]);
        batch_out.push_back(targets[order[i]]);
      }
      const Gradients g = backprop_mse(net, batch_in, batch_out);
      weighted += g.loss * static_cast<double>(end - begin);
      if (cfg.learning_rate > 0.0) {
        for (std::size_t l = 0; l < net.depth(); ++l) {
          net.mutable_layer(l).op.gradient_step(g.weight[l], g.bias[l], cfg.learning_rate);
        }
      }
    }
    result.epoch_mse.push_back(weighted / static_cast<double>(order.size()));
  }

  result.final_mse = mean_squared_error(net, inputs, targets);
  std::vector<Layer> layers = net.layers();
  const auto split = layers.begin() + static_cast<std::ptrdiff_t>(encoder.depth());
  result.encoder = Network(std::vector<Layer>(layers.begin(), split));
  result.decoder = Network(std::vector<Layer>(split, layers.end()));
  return result;
}

LinearOperator random_dense(std::size_t outputs, std::size_t inputs, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(inputs));
  Tensor w({outputs, inputs});
  for (double& v : w.values()) v = rng.uniform(-bound, bound);
  return LinearOperator::dense(std::move(w), Tensor({outputs}));
}

std::pair<Network, Network> make_dense_autoencoder(std::size_t input_dim, std::size_t code_dim,
                                                   std::uint64_t seed) {
  if (code_dim == 0 || input_dim == 0) throw ParameterError("autoencoder dimensions must be positive");
  Rng rng(seed);
  Network encoder({Layer{random_dense(code_dim, input_dim, rng), ProxPenalty::relu()}});
  Network decoder({Layer{random_dense(input_dim, code_dim, rng), ProxPenalty::zero()}});
  return {std::move(encoder), std::move(decoder)};
}

std::pair<Network, Network> make_conv_autoencoder(std::uint64_t seed) {
  Rng rng(seed);
  Network encoder({
      Layer{random_conv(8, 1, 4, 2, 28, 28, false, rng), ProxPenalty::relu()},
      Layer{random_conv(16, 8, 4, 2, 14, 14, false, rng), ProxPenalty::relu()},
      Layer{random_dense(300, 784, rng), ProxPenalty::relu()},
  });
  Network decoder({
      Layer{random_dense(784, 300, rng), ProxPenalty::zero()},
      Layer{random_conv(8, 16, 4, 2, 7, 7, true, rng), ProxPenalty::relu()},
      Layer{random_conv(1, 8, 4, 2, 14, 14, true, rng), ProxPenalty::relu()},
  });
  return {std::move(encoder), std::move(decoder)};
}

TrainResult train_dense_autoencoder(std::span<const Tensor> data, std::size_t code_dim,
                                    const TrainConfig& cfg) {
  if (data.empty()) throw ParameterError("empty dataset");
  auto [encoder, decoder] = make_dense_autoencoder(data.front().size(), code_dim, cfg.seed);
  return train_autoencoder(std::move(encoder), std::move(decoder), data, data, cfg);
}

TrainResult train_conv_autoencoder(std::span<const Tensor> data, const TrainConfig& cfg) {
  if (data.empty()) throw ParameterError("empty dataset");
  auto [encoder, decoder] = make_conv_autoencoder(cfg.seed);
  return train_autoencoder(std::move(encoder), std::move(decoder), data, data, cfg);
}

}  // namespace lbinv
