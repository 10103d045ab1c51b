#include <doctest.h>

#include "lbinv/errors.hpp"
#include "lbinv/prox.hpp"
#include "oracles.hpp"

using namespace lbinv;

namespace {

std::vector<ProxPenalty> catalogue() {
  return {ProxPenalty::zero(), ProxPenalty::relu(), ProxPenalty::box(-0.5, 1.5), ProxPenalty::l1(0.3)};
}

}  // namespace

TEST_SUITE("prox-activations") {

TEST_CASE("activations as prox maps") {
  CHECK(ProxPenalty::relu().prox(Tensor::vector({-1, 2})) == Tensor::vector({0, 2}));
  CHECK(ProxPenalty::zero().prox(Tensor::vector({5, -3})) == Tensor::vector({5, -3}));
  CHECK(ProxPenalty::box(-1, 1).prox(Tensor::vector({-4, 0.5, 3})) == Tensor::vector({-1, 0.5, 1}));
}

TEST_CASE("soft threshold against a grid search") {
  const ProxPenalty l1 = ProxPenalty::l1(0.5);
  for (double z : {1.0, -0.2, -2.5, 0.5}) {
    double argmin = 0.0;
    oracle::grid_min_1d([&](double y) { return 0.5 * (y - z) * (y - z) + 0.5 * std::abs(y); }, -3, 3, 1e-4,
                        &argmin);
    CHECK(std::abs(l1.prox_scalar(z) - argmin) <= 1e-4);
  }
  CHECK(l1.prox(Tensor::vector({1, -0.2})) == Tensor::vector({0.5, 0}));
}

TEST_CASE("conjugate of the shifted penalty against a grid supremum") {
  // ReLU: sup over y in [0, 10]^2 separates into two 1-D searches.
  auto sup_1d = [](const ProxPenalty& p, double z, double lo, double hi) {
    return -oracle::grid_min_1d([&](double y) { return -(z * y - 0.5 * y * y - p.eval_scalar(y)); }, lo, hi, 1e-3);
  };
  const ProxPenalty relu = ProxPenalty::relu();
  const double grid = sup_1d(relu, 3, 0, 10) + sup_1d(relu, -2, 0, 10);
  CHECK(relu.conjugate_shifted(Tensor::vector({3, -2})) == doctest::Approx(4.5));
  CHECK(std::abs(grid - 4.5) < 1e-5);

  const ProxPenalty zero = ProxPenalty::zero();
  const double zgrid = sup_1d(zero, 1, -10, 10) + sup_1d(zero, 2, -10, 10);
  CHECK(zero.conjugate_shifted(Tensor::vector({1, 2})) == doctest::Approx(2.5));
  CHECK(std::abs(zgrid - 2.5) < 1e-5);

  for (const auto& p : catalogue()) {
    CHECK(p.conjugate_shifted(Tensor({3})) == 0.0);
    for (double z : {-2.0, -0.4, 0.1, 0.9, 2.7}) {
      CHECK(p.conjugate_shifted_scalar(z) == doctest::Approx(sup_1d(p, z, -10, 10)).epsilon(1e-5));
    }
  }
}

TEST_CASE("penalty values") {
  CHECK(ProxPenalty::relu().eval(Tensor::vector({0, 1})) == 0.0);
  CHECK(ProxPenalty::relu().eval(Tensor::vector({-0.1, 1})) == kInfinity);
  CHECK(ProxPenalty::l1(2).eval(Tensor::vector({1, -1})) == 4.0);
  CHECK(ProxPenalty::box(-1, 1).eval(Tensor::vector({1.5})) == kInfinity);
  CHECK_THROWS_AS(ProxPenalty::box(0.5, 1), ParameterError);
  CHECK_THROWS_AS(ProxPenalty::l1(-1), ParameterError);
}

TEST_CASE("derivative of the conjugate is the prox") {
  Rng rng(11);
  for (const auto& p : catalogue()) {
    for (int trial = 0; trial < 200; ++trial) {
      const Tensor z = oracle::random_tensor({3}, rng, -3, 3);
      const Tensor sigma = p.prox(z);
      for (std::size_t i = 0; i < z.size(); ++i) {
        // skip points within the stencil of a kink
        const double zi = z[i];
        if (std::abs(zi) < 1e-3 || std::abs(zi - 0.3) < 1e-3 || std::abs(zi + 0.3) < 1e-3 ||
            std::abs(zi + 0.5) < 1e-3 || std::abs(zi - 1.5) < 1e-3)
          continue;
        const double fd = oracle::central_difference([&](const Tensor& t) { return p.conjugate_shifted(t); }, z, i, 1e-5);
        CHECK(std::abs(fd - sigma[i]) < 1e-4);
      }
    }
  }
}

TEST_CASE("prox is non-expansive and optimal") {
  Rng rng(12);
  for (const auto& p : catalogue()) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Tensor z1 = oracle::random_tensor({4}, rng, -3, 3);
      const Tensor z2 = oracle::random_tensor({4}, rng, -3, 3);
      CHECK(norm(p.prox(z1) - p.prox(z2)) <= norm(z1 - z2) + 1e-15);
    }
    for (int trial = 0; trial < 200; ++trial) {
      const Tensor z = oracle::random_tensor({4}, rng, -3, 3);
      const Tensor y = p.project_domain(oracle::random_tensor({4}, rng, -3, 3));
      const Tensor s = p.prox(z);
      CHECK(p.eval(s) + 0.5 * squared_norm(s - z) <= p.eval(y) + 0.5 * squared_norm(y - z) + 1e-12);
      CHECK(std::isfinite(p.eval(s)));
    }
  }
}

TEST_CASE("scaled prox") {
  const ProxPenalty l1 = ProxPenalty::l1(1.0);
  CHECK(l1.prox_scaled(Tensor::vector({2, -0.5}), 0.25) == Tensor::vector({1.75, -0.25}));
  CHECK(ProxPenalty::relu().prox_scaled(Tensor::vector({-2, 2}), 7.0) == Tensor::vector({0, 2}));
  CHECK(ProxPenalty::relu().prox_derivative(0.0) == 0.0);
  CHECK(ProxPenalty::relu().prox_derivative(0.1) == 1.0);
}

}  // TEST_SUITE
