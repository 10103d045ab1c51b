#include <doctest.h>

#include "lbinv/errors.hpp"
#include "lbinv/linear_operator.hpp"
#include "lbinv/tensor.hpp"
#include "oracles.hpp"

using namespace lbinv;

TEST_SUITE("tensor-core") {

TEST_CASE("tensor construction checks the shape against the data") {
  CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
  const Tensor m = Tensor::matrix({{1, 2, 3}, {4, 5, 6}});
  CHECK(m.shape() == Shape{2, 3});
  CHECK(m.at(1, 2) == 6.0);
  CHECK(numel({}) == 1);
  CHECK(to_string(Shape{3, 4}) == "[3x4]");
}

TEST_CASE("tensor arithmetic") {
  Tensor a = Tensor::vector({1, 2, 3});
  const Tensor b = Tensor::vector({3, 2, 1});
  CHECK(dot(a, b) == 10.0);
  CHECK(squared_norm(a) == 14.0);
  CHECK(max_abs(a - b) == 2.0);
  CHECK(min_value(b) == 1.0);
  axpy(2.0, b, a);
  CHECK(a == Tensor::vector({7, 6, 5}));
  CHECK_THROWS_AS(a += Tensor::vector({1}), DimensionError);
  CHECK(a.reshaped({3, 1}).shape() == Shape{3, 1});
  CHECK_THROWS_AS(a.reshaped({2, 2}), DimensionError);
}

TEST_CASE("dense forward by hand") {
  const auto id = LinearOperator::dense(Tensor::matrix({{1, 0}, {0, 1}}), Tensor::vector({0, 0}));
  CHECK(id.forward(Tensor::vector({3, 4})) == Tensor::vector({3, 4}));
  const auto row = LinearOperator::dense(Tensor::matrix({{1, 2}}), Tensor::vector({1}));
  CHECK(row.forward(Tensor::vector({1, 1})) == Tensor::vector({4}));
  CHECK(row.adjoint_apply(Tensor::vector({1})) == Tensor::vector({1, 2}));
  CHECK_THROWS_AS(row.forward(Tensor::vector({1, 1, 1})), DimensionError);
  CHECK_THROWS_AS(row.adjoint_apply(Tensor::vector({1, 1})), DimensionError);
}

TEST_CASE("dense adjoint identity on a random 5x7 map") {
  Rng rng(1);
  const auto op = LinearOperator::dense(oracle::random_tensor({5, 7}, rng), oracle::random_tensor({5}, rng));
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor x = oracle::random_tensor({7}, rng);
    const Tensor u = oracle::random_tensor({5}, rng);
    const double lhs = dot(op.apply_linear(x), u);
    const double rhs = dot(x, op.adjoint_apply(u));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("3x3 stride-2 conv on 4x4 equals the textbook correlation and its dense matrix") {
  Rng rng(2);
  const Tensor k = oracle::random_tensor({2, 1, 3, 3}, rng);
  const Tensor b = oracle::random_tensor({2}, rng);
  const auto op = LinearOperator::conv2d(k, b, 2, 0, 4, 4);
  CHECK(op.output_shape() == Shape{2, 1, 1});
  const auto padded = LinearOperator::conv2d(k, b, 2, 1, 4, 4);
  CHECK(padded.output_shape() == Shape{2, 2, 2});

  for (const auto* conv : {&op, &padded}) {
    const Tensor x = oracle::random_tensor({1, 4, 4}, rng);
    const Tensor direct = oracle::naive_conv2d(x, k, b, 2, conv->padding());
    CHECK(max_abs(conv->forward(x) - direct) < 1e-13);

    const Eigen::MatrixXd a = oracle::materialize(*conv);
    const Eigen::VectorXd via_matrix = a * oracle::to_eigen(x);
    CHECK(max_abs(conv->apply_linear(x) - oracle::from_eigen(via_matrix, conv->output_shape())) < 1e-13);

    const Tensor u = oracle::random_tensor(conv->output_shape(), rng);
    const Eigen::VectorXd at_u = a.transpose() * oracle::to_eigen(u);
    CHECK(max_abs(conv->adjoint_apply(u) - oracle::from_eigen(at_u, conv->input_shape())) < 1e-13);
  }
}

TEST_CASE("transpose conv is the adjoint of the conv with the same kernel") {
  Rng rng(3);
  // Conv2d kernel [out=3, in=2]; the transpose maps 3 channels back to 2 with kernel [in=3, out=2]
  // holding the same numbers.
  const Tensor k = oracle::random_tensor({3, 2, 4, 4}, rng);
  const auto conv = LinearOperator::conv2d(k, Tensor({3}), 2, 1, 8, 8);
  const auto convt = LinearOperator::conv_transpose2d(k, Tensor({2}), 2, 1, 4, 4);
  CHECK(conv.output_shape() == Shape{3, 4, 4});
  CHECK(convt.output_shape() == Shape{2, 8, 8});
  const Eigen::MatrixXd a = oracle::materialize(conv);
  const Eigen::MatrixXd t = oracle::materialize(convt);
  CHECK((a.transpose() - t).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("adjoint identity for every operator kind") {
  Rng rng(4);
  const std::vector<LinearOperator> ops = {
      LinearOperator::dense(oracle::random_tensor({6, 9}, rng), oracle::random_tensor({6}, rng)),
      LinearOperator::conv2d(oracle::random_tensor({4, 3, 3, 3}, rng), oracle::random_tensor({4}, rng), 2, 1, 7, 6),
      LinearOperator::conv2d(oracle::random_tensor({2, 1, 4, 4}, rng), Tensor({2}), 2, 1, 28, 28),
      LinearOperator::conv_transpose2d(oracle::random_tensor({3, 2, 4, 4}, rng), oracle::random_tensor({2}, rng), 2, 1, 5, 5),
      LinearOperator::conv_transpose2d(oracle::random_tensor({2, 2, 3, 3}, rng), Tensor({2}), 1, 0, 4, 3),
  };
  for (const auto& op : ops) {
    for (int trial = 0; trial < 10; ++trial) {
      const Tensor x = oracle::random_tensor(op.input_shape(), rng);
      const Tensor u = oracle::random_tensor(op.output_shape(), rng);
      const double lhs = dot(op.apply_linear(x), u);
      const double rhs = dot(x, op.adjoint_apply(u));
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("forward is affine") {
  Rng rng(5);
  const auto op = LinearOperator::conv2d(oracle::random_tensor({2, 2, 3, 3}, rng), oracle::random_tensor({2}, rng), 1, 1, 5, 5);
  const Tensor x = oracle::random_tensor(op.input_shape(), rng);
  const Tensor y = oracle::random_tensor(op.input_shape(), rng);
  const Tensor f0 = op.forward(Tensor(op.input_shape()));
  const Tensor lhs = op.forward(x + y) - f0;
  const Tensor rhs = (op.forward(x) - f0) + (op.forward(y) - f0);
  CHECK(max_abs(lhs - rhs) < 1e-12);
}

TEST_CASE("conv shape rules round-trip") {
  for (std::size_t n : {7u, 14u, 28u}) {
    const auto conv = LinearOperator::conv2d(Tensor({1, 1, 4, 4}), Tensor({1}), 2, 1, n * 2, n * 2);
    CHECK(conv.output_shape() == Shape{1, n, n});
    const auto back = LinearOperator::conv_transpose2d(Tensor({1, 1, 4, 4}), Tensor({1}), 2, 1, n, n);
    CHECK(back.output_shape() == Shape{1, n * 2, n * 2});
  }
  // floor((n - k) / s) + 1 without padding
  const auto c = LinearOperator::conv2d(Tensor({1, 1, 3, 3}), Tensor({1}), 2, 0, 8, 9);
  CHECK(c.output_shape() == Shape{1, 3, 4});
  CHECK(LinearOperator::default_padding(4, 2) == 1);
  CHECK_THROWS_AS(LinearOperator::conv2d(Tensor({1, 1, 5, 5}), Tensor({1}), 1, 0, 3, 3), DimensionError);
  CHECK_THROWS_AS(LinearOperator::conv2d(Tensor({1, 2, 3, 3}), Tensor({1}), 1, 0, 3, 3).forward(Tensor({1, 3, 3})),
                  DimensionError);
}

TEST_CASE("power iteration") {
  const auto diag = LinearOperator::dense(Tensor::matrix({{3, 0}, {0, 1}}), Tensor({2}));
  CHECK(operator_norm_sq(diag) == doctest::Approx(9.0).epsilon(0.01));
  const auto id = LinearOperator::dense(Tensor::matrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), Tensor({3}));
  CHECK(operator_norm_sq(id) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(operator_norm_sq(LinearOperator::dense(Tensor({4, 3}), Tensor({4}))) == 0.0);

  Rng rng(6);
  for (std::size_t n : {10u, 50u}) {
    const Tensor w = oracle::random_tensor({n, n}, rng);
    const auto op = LinearOperator::dense(w, Tensor({n}));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(oracle::materialize(op));
    const double exact = svd.singularValues()(0) * svd.singularValues()(0);
    CHECK(oracle::relative_error(operator_norm_sq(op), exact) < 0.01);
  }

  // More iterations never lower the Rayleigh quotient.
  const auto op = LinearOperator::dense(oracle::random_tensor({20, 15}, rng), Tensor({20}));
  double prev = 0.0;
  for (int iters = 1; iters <= 64; iters *= 2) {
    const double v = operator_norm_sq(op, iters);
    CHECK(v >= prev * (1.0 - 1e-14));
    prev = v;
  }
  CHECK_THROWS_AS(operator_norm_sq(op, 0), ParameterError);
}

}  // TEST_SUITE
