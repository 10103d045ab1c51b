#pragma once

#include <vector>

#include "lbinv/linear_operator.hpp"
#include "lbinv/prox.hpp"
#include "lbinv/tensor.hpp"

namespace lbinv {

/// One affine map followed by its proximal activation.
struct Layer {
  LinearOperator op;
  ProxPenalty penalty;

  Tensor forward(const Tensor& x) const { return penalty.prox(op.forward(x)); }
};

/// Feed-forward network sigma_L(f(... sigma_1(f(x, Theta_1)) ..., Theta_L)).
///
/// Consecutive layers chain by element count: a convolution producing
/// [C, H, W] may feed a dense layer with C*H*W columns and vice versa.
/// The network never stores data vectors; solvers own them.
class Network {
 public:
  Network() = default;
  explicit Network(std::vector<Layer> layers);

  std::size_t depth() const noexcept { return layers_.size(); }
  bool empty() const noexcept { return layers_.empty(); }
  const Layer& layer(std::size_t l) const { return layers_.at(l); }
  Layer& mutable_layer(std::size_t l) { return layers_.at(l); }
  const std::vector<Layer>& layers() const noexcept { return layers_; }

  const Shape& input_shape() const;
  const Shape& output_shape() const;

  /// Appends a layer after checking that it chains onto the current output.
  void push_back(Layer layer);

  /// Network consisting of this network's layers followed by other's.
  Network then(const Network& other) const;

 private:
  std::vector<Layer> layers_;
};

Tensor net_forward(const Network& net, const Tensor& x);

/// Post-activation states x_1, ..., x_L; the last equals net_forward(x).
std::vector<Tensor> hidden_states(const Network& net, const Tensor& x);

}  // namespace lbinv
