#include <benchmark/benchmark.h>

#include "lbinv/experiments.hpp"
#include "lbinv/linear_operator.hpp"
#include "lbinv/rng.hpp"
#include "lbinv/solvers.hpp"
#include "lbinv/training.hpp"
#include "lbinv/tv.hpp"

using namespace lbinv;

namespace {

Tensor noise(const Shape& shape, std::uint64_t seed) {
  Rng rng(seed);
  Tensor t(shape);
  for (double& v : t.values()) v = rng.uniform(-1.0, 1.0);
  return t;
}

// The two conv layers of the MNIST encoder and their transposes in the decoder.
LinearOperator encoder_conv(std::size_t in_c, std::size_t out_c, std::size_t n) {
  return LinearOperator::conv2d(noise({out_c, in_c, 4, 4}, 1), Tensor({out_c}), 2, 1, n, n);
}

void BM_Conv2dForward(benchmark::State& state) {
  const auto in_c = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto op = encoder_conv(in_c, 2 * in_c, n);
  const Tensor x = noise(op.input_shape(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(op.forward(x));
}
BENCHMARK(BM_Conv2dForward)->Args({1, 28})->Args({8, 14});

void BM_Conv2dAdjoint(benchmark::State& state) {
  const auto in_c = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto op = encoder_conv(in_c, 2 * in_c, n);
  const Tensor u = noise(op.output_shape(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(op.adjoint_apply(u));
}
BENCHMARK(BM_Conv2dAdjoint)->Args({1, 28})->Args({8, 14});

void BM_ConvTransposeForward(benchmark::State& state) {
  const auto op = LinearOperator::conv_transpose2d(noise({16, 8, 4, 4}, 4), Tensor({8}), 2, 1, 7, 7);
  const Tensor x = noise(op.input_shape(), 5);
  for (auto _ : state) benchmark::DoNotOptimize(op.forward(x));
}
BENCHMARK(BM_ConvTransposeForward);

void BM_DenseForward(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto op = LinearOperator::dense(noise({m, n}, 6), Tensor({m}));
  const Tensor x = noise({n}, 7);
  for (auto _ : state) benchmark::DoNotOptimize(op.forward(x));
}
BENCHMARK(BM_DenseForward)->Args({100, 784})->Args({512, 4096});

void BM_TvGradDiv(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor img = noise({n, n}, 8);
  for (auto _ : state) {
    DualField g = grad_image(img);
    benchmark::DoNotOptimize(div_field(project_dual_ball(std::move(g))));
  }
}
BENCHMARK(BM_TvGradDiv)->Arg(28)->Arg(64);

void BM_PdhgCircleIteration(benchmark::State& state) {
  const Layer layer = random_relu_layer(512, 64 * 64, 0);
  const Tensor y = layer.forward(noise({64, 64}, 9));
  const Regulariser tv = Regulariser::total_variation(64, 64);
  const PdhgConfig cfg = PdhgConfig::standard(1.5e-2, operator_norm_sq(layer.op), tv.k_norm_sq(), 10, 0.0);
  const Tensor x0({64, 64});
  for (auto _ : state) benchmark::DoNotOptimize(pdhg_invert_perceptron(layer, y, tv, cfg, x0));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 10);
}
BENCHMARK(BM_PdhgCircleIteration)->Unit(benchmark::kMillisecond);

void BM_CnnSweep(benchmark::State& state) {
  const auto [enc, dec] = make_conv_autoencoder(0);
  const Tensor image = noise({28, 28}, 10);
  const CoordinateDescentConfig cfg = cnn_solver_config(enc, 9e-3, 1, 50, 0.0);
  const Tensor y = net_forward(enc, image);
  const Regulariser tv = Regulariser::total_variation(28, 28);
  for (auto _ : state) {
    benchmark::DoNotOptimize(coordinate_descent_invert(enc, y, tv, cfg, Tensor({28, 28})));
  }
}
BENCHMARK(BM_CnnSweep)->Unit(benchmark::kMillisecond);

void BM_ConvAutoencoderBackprop(benchmark::State& state) {
  const auto [enc, dec] = make_conv_autoencoder(0);
  const Network net = enc.then(dec);
  const std::vector<Tensor> batch{noise({28, 28}, 11), noise({28, 28}, 12)};
  for (auto _ : state) benchmark::DoNotOptimize(backprop_mse(net, batch, batch));
}
BENCHMARK(BM_ConvAutoencoderBackprop)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
