#include "lbinv/network.hpp"

#include "lbinv/errors.hpp"

namespace lbinv {

Network::Network(std::vector<Layer> layers) {
  layers_.reserve(layers.size());
  for (auto& layer : layers) push_back(std::move(layer));
}

void Network::push_back(Layer layer) {
  if (!layers_.empty() && layers_.back().op.output_size() != layer.op.input_size()) {
    throw DimensionError("layer " + std::to_string(layers_.size()) + " expects input " +
                         to_string(layer.op.input_shape()) + " but previous layer produces " +
                         to_string(layers_.back().op.output_shape()));
  }
  layers_.push_back(std::move(layer));
}

const Shape& Network::input_shape() const {
  if (layers_.empty()) throw DimensionError("empty network has no input shape");
  return layers_.front().op.input_shape();
}

const Shape& Network::output_shape() const {
  if (layers_.empty()) throw DimensionError("empty network has no output shape");
  return layers_.back().op.output_shape();
}

Network Network::then(const Network& other) const {
  Network out = *this;
  for (const auto& layer : other.layers()) out.push_back(layer);
  return out;
}

Tensor net_forward(const Network& net, const Tensor& x) {
  if (net.empty()) throw DimensionError("net_forward on empty network");
  Tensor state = x;
  for (const auto& layer : net.layers()) state = layer.forward(state);
  return state;
}

std::vector<Tensor> hidden_states(const Network& net, const Tensor& x) {
  if (net.empty()) throw DimensionError("hidden_states on empty network");
  std::vector<Tensor> states;
  states.reserve(net.depth());
  const Tensor* prev = &x;
  for (const auto& layer : net.layers()) {
    states.push_back(layer.forward(*prev));
    prev = &states.back();
  }
  return states;
}

}  // namespace lbinv
