#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "lbinv/data_io.hpp"
#include "lbinv/errors.hpp"
#include "oracles.hpp"

using namespace lbinv;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lbinv_data_io_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("data-io") {

TEST_CASE("circle phantom") {
  const Tensor c = circle_phantom(64, 64, 0.25);
  // area of a radius-16 disk is about 804 pixels, |x| = sqrt(804) ~ 28.4
  CHECK(norm(c) > 28.07 * 0.85);
  CHECK(norm(c) < 28.07 * 1.15);
  CHECK(min_value(c) == 0.0);
  CHECK(max_abs(c) == 1.0);
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 64; ++j) {
      CHECK(c.at(i, j) == c.at(63 - i, j));
      CHECK(c.at(i, j) == c.at(j, i));
    }
  CHECK(norm(circle_phantom(64, 64, 0.0)) == 0.0);
  CHECK(norm(circle_phantom(64, 64, 0.25, 2.0)) == doctest::Approx(2.0 * norm(c)));
  CHECK_THROWS_AS(circle_phantom(8, 8, 0.5), ParameterError);
}

TEST_CASE("noise") {
  const Tensor y = Tensor::vector({0.0, 0.5, 1.0, 2.0});
  const NoisyData clean = add_noise(y, NoiseSpec{0.0, 1, false}, ProxPenalty::relu());
  CHECK(clean.y_delta == y);
  CHECK(clean.delta_sq == 0.0);

  const Tensor big({2000}, 0.0);
  const NoisyData a = add_noise(big, NoiseSpec{1.0, 7, true}, ProxPenalty::relu());
  CHECK(min_value(a.y_delta) >= 0.0);
  const NoisyData b = add_noise(big, NoiseSpec{1.0, 7, true}, ProxPenalty::relu());
  CHECK(a.y_delta == b.y_delta);
  const NoisyData raw1 = add_noise(big, NoiseSpec{1.0, 7, false}, ProxPenalty::zero());
  const NoisyData raw2 = add_noise(big, NoiseSpec{1.0, 8, false}, ProxPenalty::zero());
  CHECK(raw1.delta_sq == doctest::Approx(0.5 * squared_norm(raw1.y_delta)));
  CHECK(std::sqrt(squared_norm(raw1.y_delta) / 2000.0) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(dot(raw1.y_delta, raw2.y_delta)) / 2000.0 < 0.1);

  // With the clean pre-activation, delta_sq is the Bregman loss of the noisy data.
  const Tensor pre = Tensor::vector({-1.0, 0.5});
  const NoisyData breg = add_noise(Tensor::vector({0.0, 0.5}), NoiseSpec{0.0, 0, true}, ProxPenalty::relu(), pre);
  CHECK(breg.delta_sq == doctest::Approx(0.0));
}

TEST_CASE("IDX round trip") {
  IdxFile f;
  f.dims = {3, 2, 2};
  for (int i = 0; i < 12; ++i) f.bytes.push_back(static_cast<std::uint8_t>(i * 20));
  const fs::path p = scratch("images.idx");
  write_idx(p, f);
  CHECK(read_idx(p) == f);
  const auto images = load_idx_images(p);
  REQUIRE(images.size() == 3);
  CHECK(images[0].shape() == Shape{2, 2});
  CHECK(images[2][3] == doctest::Approx(220.0 / 255.0));
  CHECK_THROWS_AS(load_idx_labels(p), FormatError);

  IdxFile labels;
  labels.dims = {4};
  labels.bytes = {7, 2, 1, 0};
  write_idx(scratch("labels.idx"), labels);
  CHECK(load_idx_labels(scratch("labels.idx")) == labels.bytes);

  const std::string full = slurp(p);
  {
    std::ofstream out(scratch("short.idx"), std::ios::binary);
    out.write(full.data(), static_cast<std::streamsize>(full.size() - 5));
  }
  try {
    read_idx(scratch("short.idx"));
    FAIL("expected truncation error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("expected 12 bytes, got 7") != std::string::npos);
  }
  {
    std::ofstream out(scratch("magic.idx"), std::ios::binary);
    out << "GIF89a....";
  }
  CHECK_THROWS_AS(read_idx(scratch("magic.idx")), FormatError);
  CHECK_THROWS_AS(read_idx(scratch("missing.idx")), FormatError);
}

TEST_CASE("PSNR") {
  const Tensor ref({10, 10}, 0.5);
  CHECK(std::isinf(psnr(ref, ref)));
  CHECK(psnr(ref + Tensor({10, 10}, 0.1), ref) == doctest::Approx(20.0));
  CHECK(psnr(Tensor({10, 10}, 1.0), Tensor({10, 10})) == doctest::Approx(0.0));
  Rng rng(91);
  const Tensor a = oracle::random_tensor({10, 10}, rng, 0, 1);
  CHECK(psnr(a, ref) == doctest::Approx(psnr(ref, a)));
  CHECK(psnr(a + Tensor({10, 10}, 3.0), ref + Tensor({10, 10}, 3.0)) == doctest::Approx(psnr(a, ref)));
  CHECK(psnr(ref + Tensor({10, 10}, 0.2), ref, 2.0) == doctest::Approx(20.0));
}

TEST_CASE("PGM and image strips") {
  const Tensor img = Tensor::matrix({{0.0, 0.5}, {1.0, 2.0}});
  write_pgm(scratch("a.pgm"), img);
  const std::string bytes = slurp(scratch("a.pgm"));
  REQUIRE(bytes.rfind("P5\n2 2\n255\n", 0) == 0);
  const std::string px = bytes.substr(bytes.size() - 4);
  CHECK(static_cast<unsigned char>(px[0]) == 0);
  CHECK(static_cast<unsigned char>(px[1]) == 128);
  CHECK(static_cast<unsigned char>(px[3]) == 255);

  const Tensor strip = hstack_images({img, img, img});
  CHECK(strip.shape() == Shape{2, 8});
  CHECK(strip.at(1, 2) == 0.0);
  CHECK(strip.at(1, 4) == 2.0);
  CHECK_THROWS(hstack_images({img, Tensor({3, 3})}));
}

TEST_CASE("CSV and number formatting") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(std::stod(format_number(0.1 + 0.2)) == 0.1 + 0.2);
  write_csv(scratch("t.csv"), CsvTable{{"a", "b"}, {{"1", format_number(psnr(Tensor({1}), Tensor({1})))}}});
  CHECK(slurp(scratch("t.csv")) == "a,b\n1,inf\n");
}

}  // TEST_SUITE
