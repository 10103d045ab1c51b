#include "lbinv/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>

#include "lbinv/bregman.hpp"
#include "lbinv/errors.hpp"
#include "lbinv/rng.hpp"

namespace lbinv {

namespace fs = std::filesystem;

Tensor circle_phantom(std::size_t h, std::size_t w, double radius_frac, double value) {
  if (h == 0 || w == 0) throw DimensionError("phantom dimensions must be positive");
  if (!(radius_frac >= 0.0 && radius_frac < 0.5)) {
    throw ParameterError("radius fraction must lie in [0, 0.5)");
  }
  Tensor img({h, w});
  const double r = radius_frac * static_cast<double>(std::min(h, w));
  const double ci = 0.5 * static_cast<double>(h - 1);
  const double cj = 0.5 * static_cast<double>(w - 1);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const double di = static_cast<double>(i) - ci;
      const double dj = static_cast<double>(j) - cj;
      if (di * di + dj * dj < r * r) img.at(i, j) = value;
    }
  }
  return img;
}

NoisyData add_noise(const Tensor& y, const NoiseSpec& spec, const ProxPenalty& penalty,
                    const std::optional<Tensor>& clean_pre) {
  if (!(spec.std >= 0.0)) throw ParameterError("noise std must be non-negative");
  NoisyData out{y, 0.0};
  if (spec.std > 0.0) {
    Rng rng(spec.seed);
    for (double& v : out.y_delta.values()) v += spec.std * rng.normal();
  }
  if (spec.clip_nonneg) out.y_delta = penalty.project_domain(out.y_delta);
  if (clean_pre) {
    out.delta_sq = BregmanLoss(penalty).loss(out.y_delta, *clean_pre);
  } else {
    out.delta_sq = 0.5 * squared_norm(out.y_delta - y);
  }
  return out;
}

namespace {

std::uint32_t get_be32(const unsigned char* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

void put_be32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b, 4);
}

}  // namespace

IdxFile read_idx(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  const std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());
  if (raw.size() < 4) throw FormatError(path.string() + ": truncated IDX header");
  const std::uint32_t magic = get_be32(raw.data());
  const std::size_t ndims = magic & 0xFF;
  if ((magic >> 8) != 0x08 || ndims == 0) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08X", magic);
    throw FormatError(path.string() + ": bad IDX magic " + buf);
  }
  const std::size_t header = 4 + 4 * ndims;
  if (raw.size() < header) throw FormatError(path.string() + ": truncated IDX header");
  IdxFile file;
  std::size_t expected = 1;
  for (std::size_t d = 0; d < ndims; ++d) {
    file.dims.push_back(get_be32(raw.data() + 4 + 4 * d));
    expected *= file.dims.back();
  }
  const std::size_t actual = raw.size() - header;
  if (actual < expected) {
    throw FormatError(path.string() + ": truncated IDX payload, expected " +
                      std::to_string(expected) + " bytes, got " + std::to_string(actual));
  }
  file.bytes.assign(raw.begin() + static_cast<std::ptrdiff_t>(header),
                    raw.begin() + static_cast<std::ptrdiff_t>(header + expected));
  return file;
}

void write_idx(const fs::path& path, const IdxFile& file) {
  if (file.dims.empty() || file.dims.size() > 255) throw DimensionError("IDX needs 1 to 255 dims");
  std::size_t expected = 1;
  for (std::size_t d : file.dims) expected *= d;
  if (expected != file.bytes.size()) throw DimensionError("IDX payload does not match dims");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  put_be32(out, 0x0800u | static_cast<std::uint32_t>(file.dims.size()));
  for (std::size_t d : file.dims) put_be32(out, static_cast<std::uint32_t>(d));
  out.write(reinterpret_cast<const char*>(file.bytes.data()),
            static_cast<std::streamsize>(file.bytes.size()));
  if (!out) throw FormatError("write failed: " + path.string());
}

std::vector<Tensor> load_idx_images(const fs::path& path) {
  const IdxFile file = read_idx(path);
  if (file.dims.size() != 3) throw FormatError(path.string() + ": expected a 3-D image file");
  const std::size_t rows = file.dims[1], cols = file.dims[2];
  std::vector<Tensor> images;
  images.reserve(file.dims[0]);
  for (std::size_t n = 0; n < file.dims[0]; ++n) {
    Tensor img({rows, cols});
    const std::uint8_t* src = file.bytes.data() + n * rows * cols;
    for (std::size_t k = 0; k < rows * cols; ++k) img[k] = src[k] / 255.0;
    images.push_back(std::move(img));
  }
  return images;
}

std::vector<std::uint8_t> load_idx_labels(const fs::path& path) {
  IdxFile file = read_idx(path);
  if (file.dims.size() != 1) throw FormatError(path.string() + ": expected a 1-D label file");
  return std::move(file.bytes);
}

void write_pgm(const fs::path& path, const Tensor& image, double peak) {
  if (image.rank() != 2) throw DimensionError("PGM needs a 2-D image, got " + to_string(image.shape()));
  if (!(peak > 0.0)) throw ParameterError("PGM peak must be positive");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "P5\n" << image.dim(1) << ' ' << image.dim(0) << "\n255\n";
  std::vector<char> px(image.size());
  for (std::size_t k = 0; k < image.size(); ++k) {
    const double v = std::clamp(image[k] / peak, 0.0, 1.0);
    px[k] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v)));
  }
  out.write(px.data(), static_cast<std::streamsize>(px.size()));
  if (!out) throw FormatError("write failed: " + path.string());
}

Tensor hstack_images(const std::vector<Tensor>& images) {
  if (images.empty()) throw DimensionError("nothing to stack");
  const Shape& s = images.front().shape();
  if (s.size() != 2) throw DimensionError("hstack needs 2-D images");
  const std::size_t h = s[0], w = s[1];
  Tensor out({h, images.size() * (w + 1) - 1});
  for (std::size_t n = 0; n < images.size(); ++n) {
    if (images[n].shape() != s) throw DimensionError("hstack shapes differ");
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) out.at(i, n * (w + 1) + j) = images[n].at(i, j);
    }
  }
  return out;
}

void write_csv(const fs::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw DimensionError("CSV row width differs from header");
    line(row);
  }
  if (!out) throw FormatError("write failed: " + path.string());
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double psnr(const Tensor& x, const Tensor& ref, double peak) {
  require_same_size(x, ref, "psnr");
  if (x.empty()) throw DimensionError("psnr of empty images");
  const double mse = squared_norm(x - ref) / static_cast<double>(x.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace lbinv
