#pragma once

#include <filesystem>
#include <iosfwd>

#include "lbinv/network.hpp"
#include "lbinv/tensor.hpp"

namespace lbinv {

// LBTF tensor block (all integers and floats little-endian):
//   "LBTF" | u32 rank | rank x u64 dims | row-major f64 payload
void write_tensor(std::ostream& out, const Tensor& t);
Tensor read_tensor(std::istream& in);
void save_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor load_tensor(const std::filesystem::path& path);

// LBNN model archive:
//   "LBNN" | u32 layer count | per layer:
//     u8 operator kind (0 dense, 1 conv2d, 2 conv_transpose2d)
//     u8 activation (0 zero, 1 relu, 2 box, 3 l1)
//     conv kinds only: u32 stride | u32 padding | u32 input height | u32 input width
//     box only: f64 lo | f64 hi;  l1 only: f64 lambda
//     LBTF weight | LBTF bias
void write_network(std::ostream& out, const Network& net);
Network read_network(std::istream& in);
void save_network(const std::filesystem::path& path, const Network& net);
Network load_network(const std::filesystem::path& path);

}  // namespace lbinv
