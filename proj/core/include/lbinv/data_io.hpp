#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lbinv/prox.hpp"
#include "lbinv/tensor.hpp"

namespace lbinv {

/// Centred disk: value where the distance to the image centre is below
/// radius_frac * min(h, w), zero elsewhere.
Tensor circle_phantom(std::size_t h, std::size_t w, double radius_frac, double value = 1.0);

struct NoiseSpec {
  double std = 0.0;
  std::uint64_t seed = 0;
  bool clip_nonneg = false;
};

struct NoisyData {
  Tensor y_delta;
  double delta_sq = 0.0;
};

/// y + std * N(0, I), projected onto dom(penalty) when clip_nonneg is set.
///
/// delta_sq is the realised B_Psi(y_delta, clean_pre) when the clean
/// pre-activation is given and 1/2 |y_delta - y|^2 otherwise.
NoisyData add_noise(const Tensor& y, const NoiseSpec& spec, const ProxPenalty& penalty,
                    const std::optional<Tensor>& clean_pre = std::nullopt);

/// Raw contents of an unsigned-byte IDX file.
struct IdxFile {
  std::vector<std::size_t> dims;
  std::vector<std::uint8_t> bytes;

  friend bool operator==(const IdxFile&, const IdxFile&) = default;
};

IdxFile read_idx(const std::filesystem::path& path);
void write_idx(const std::filesystem::path& path, const IdxFile& file);

/// Images of an IDX file (magic 0x00000803) scaled to [0, 1], one [rows, cols] tensor each.
std::vector<Tensor> load_idx_images(const std::filesystem::path& path);
/// Labels of an IDX file (magic 0x00000801).
std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path);

/// Binary P5 greymap, [0, peak] mapped linearly to [0, 255] and clamped.
void write_pgm(const std::filesystem::path& path, const Tensor& image, double peak = 1.0);

/// Images side by side with a one-pixel zero gutter; all must share a shape.
Tensor hstack_images(const std::vector<Tensor>& images);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Shortest round-trip decimal; infinities print as "inf" / "-inf".
std::string format_number(double v);

/// 10 log10(peak^2 / mse); +inf for identical images.
double psnr(const Tensor& x, const Tensor& ref, double peak = 1.0);

}  // namespace lbinv
