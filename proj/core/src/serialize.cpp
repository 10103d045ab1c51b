#include "lbinv/serialize.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "lbinv/errors.hpp"

namespace lbinv {

namespace {

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw FormatError(std::string("truncated stream while reading ") + what);
  }
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

double get_f64(std::istream& in, const char* what) {
  return std::bit_cast<double>(get_le<std::uint64_t>(in, what));
}

void expect_magic(std::istream& in, const char* magic) {
  char buf[4] = {};
  in.read(buf, 4);
  if (in.gcount() != 4) throw FormatError(std::string("truncated stream before ") + magic + " magic");
  if (std::memcmp(buf, magic, 4) != 0) {
    throw FormatError(std::string("bad magic: expected ") + magic);
  }
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFu) throw FormatError(std::string(what) + " does not fit in u32");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_tensor(std::ostream& out, const Tensor& t) {
  out.write("LBTF", 4);
  put_le(out, checked_u32(t.rank(), "tensor rank"));
  for (std::size_t d : t.shape()) put_le(out, static_cast<std::uint64_t>(d));
  for (double v : t.values()) put_f64(out, v);
}

Tensor read_tensor(std::istream& in) {
  expect_magic(in, "LBTF");
  const auto rank = get_le<std::uint32_t>(in, "tensor rank");
  if (rank > 16) throw FormatError("implausible tensor rank " + std::to_string(rank));
  Shape shape(rank);
  for (auto& d : shape) d = static_cast<std::size_t>(get_le<std::uint64_t>(in, "tensor dims"));
  const std::size_t count = numel(shape);
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) data[i] = get_f64(in, "tensor payload");
  return Tensor(std::move(shape), std::move(data));
}

void save_tensor(const std::filesystem::path& path, const Tensor& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_tensor(out, t);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Tensor load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_tensor(in);
}

void write_network(std::ostream& out, const Network& net) {
  out.write("LBNN", 4);
  put_le(out, checked_u32(net.depth(), "layer count"));
  for (const auto& layer : net.layers()) {
    const auto kind = layer.op.kind();
    put_le(out, static_cast<std::uint8_t>(kind));
    put_le(out, static_cast<std::uint8_t>(layer.penalty.kind()));
    if (kind != OperatorKind::DenseAffine) {
      const Shape& in_shape = layer.op.input_shape();
      put_le(out, checked_u32(layer.op.stride(), "stride"));
      put_le(out, checked_u32(layer.op.padding(), "padding"));
      put_le(out, checked_u32(in_shape[1], "input height"));
      put_le(out, checked_u32(in_shape[2], "input width"));
    }
    switch (layer.penalty.kind()) {
      case PenaltyKind::BoxIndicator:
        put_f64(out, layer.penalty.lower());
        put_f64(out, layer.penalty.upper());
        break;
      case PenaltyKind::L1:
        put_f64(out, layer.penalty.lambda());
        break;
      case PenaltyKind::Zero:
      case PenaltyKind::NonNegIndicator:
        break;
    }
    write_tensor(out, layer.op.weight());
    write_tensor(out, layer.op.bias());
  }
}

Network read_network(std::istream& in) {
  expect_magic(in, "LBNN");
  const auto count = get_le<std::uint32_t>(in, "layer count");
  Network net;
  for (std::uint32_t l = 0; l < count; ++l) {
    const auto kind_tag = get_le<std::uint8_t>(in, "operator tag");
    const auto act_tag = get_le<std::uint8_t>(in, "activation tag");
    if (kind_tag > 2) throw FormatError("unknown operator tag " + std::to_string(kind_tag));
    if (act_tag > 3) throw FormatError("unknown activation tag " + std::to_string(act_tag));
    const auto kind = static_cast<OperatorKind>(kind_tag);

    std::uint32_t stride = 1, padding = 0, height = 0, width = 0;
    if (kind != OperatorKind::DenseAffine) {
      stride = get_le<std::uint32_t>(in, "stride");
      padding = get_le<std::uint32_t>(in, "padding");
      height = get_le<std::uint32_t>(in, "input height");
      width = get_le<std::uint32_t>(in, "input width");
    }

    ProxPenalty penalty = ProxPenalty::zero();
    switch (static_cast<PenaltyKind>(act_tag)) {
      case PenaltyKind::Zero: break;
      case PenaltyKind::NonNegIndicator: penalty = ProxPenalty::relu(); break;
      case PenaltyKind::BoxIndicator: {
        const double lo = get_f64(in, "box lower bound");
        const double hi = get_f64(in, "box upper bound");
        penalty = ProxPenalty::box(lo, hi);
        break;
      }
      case PenaltyKind::L1: penalty = ProxPenalty::l1(get_f64(in, "l1 lambda")); break;
    }

    Tensor weight = read_tensor(in);
    Tensor bias = read_tensor(in);
    switch (kind) {
      case OperatorKind::DenseAffine:
        net.push_back({LinearOperator::dense(std::move(weight), std::move(bias)), penalty});
        break;
      case OperatorKind::Conv2d:
        net.push_back({LinearOperator::conv2d(std::move(weight), std::move(bias), stride, padding,
                                              height, width),
                       penalty});
        break;
      case OperatorKind::ConvTranspose2d:
        net.push_back({LinearOperator::conv_transpose2d(std::move(weight), std::move(bias), stride,
                                                        padding, height, width),
                       penalty});
        break;
    }
  }
  return net;
}

void save_network(const std::filesystem::path& path, const Network& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_network(out, net);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_network(in);
}

}  // namespace lbinv
