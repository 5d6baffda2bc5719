#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "glyphforge/errors.hpp"
#include "glyphforge/moment_features.hpp"
#include "moment_oracle.hpp"
#include "test_support.hpp"

using namespace glyphforge;
using namespace glyphforge::moments;
using glyphforge::testing::rel_close;

namespace {

BinaryImage l_shape() {
  // Asymmetric so that no invariant is trivially zero.
  BinaryImage img(40, 40);
  for (int y = 5; y < 30; ++y)
    for (int x = 6; x < 12; ++x) img.set(x, y, true);
  for (int y = 24; y < 30; ++y)
    for (int x = 12; x < 27; ++x) img.set(x, y, true);
  for (int y = 8; y < 14; ++y)
    for (int x = 12; x < 17 + (y - 8); ++x) img.set(x, y, true);
  return img;
}

BinaryImage filled_ellipse(int size, double a, double b, double angle, double ox = 0.0) {
  BinaryImage img(size, size);
  const double c = size / 2.0;
  const double ca = std::cos(angle), sa = std::sin(angle);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double dx = x + 0.5 - c, dy = y + 0.5 - c;
      const double u = ca * dx + sa * dy - ox;
      const double v = -sa * dx + ca * dy;
      // Egg with an off-axis lobe: no mirror symmetry, so phi7 is not zero.
      const double aa = u > 0 ? a : a * 0.6;
      const bool body = (u * u) / (aa * aa) + (v * v) / (b * b) <= 1.0;
      const double s = a / 55.0;
      const bool lobe = (u - 20 * s) * (u - 20 * s) + (v - 22 * s) * (v - 22 * s) <= 144.0 * s * s;
      if (body || lobe) img.set(x, y, true);
    }
  return img;
}

}  // namespace

TEST_SUITE("compute_moments") {
  TEST_CASE("single pixel") {
    BinaryImage img(5, 5);
    img.set(3, 1, true);
    const auto ms = compute_moments(img);
    CHECK(ms.central[0][0] == 1.0);
    for (int p = 0; p <= 3; ++p)
      for (int q = 0; p + q <= 3; ++q)
        if (p + q >= 1) CHECK(ms.central[p][q] == 0.0);
    CHECK(ms.cx == 3.0);
    CHECK(ms.cy == 1.0);
  }

  TEST_CASE("two diagonal pixels") {
    BinaryImage img(3, 3);
    img.set(0, 0, true);
    img.set(2, 2, true);
    const auto ms = compute_moments(img);
    CHECK(ms.cx == 1.0);
    CHECK(ms.cy == 1.0);
    CHECK(ms.central[2][0] == 2.0);
    CHECK(ms.central[0][2] == 2.0);
    CHECK(ms.central[1][1] == 2.0);
  }

  TEST_CASE("empty image") { CHECK_THROWS_AS(compute_moments(BinaryImage(4, 4)), EmptyGlyph); }

  TEST_CASE("structural invariants: mu00 == m00, mu10 == mu01 == 0, eta definition") {
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
      auto img = glyphforge::testing::random_patch(rng, 12, 9, 0.4);
      img.set(0, 0, true);
      const auto ms = compute_moments(img);
      CHECK(ms.central[0][0] == ms.raw[0][0]);
      CHECK(std::fabs(ms.central[1][0]) <= 1e-9);
      CHECK(std::fabs(ms.central[0][1]) <= 1e-9);
      for (int p = 0; p <= 3; ++p)
        for (int q = 0; p + q <= 3; ++q) {
          if (p + q < 2) continue;
          const double gamma = (p + q) / 2.0 + 1.0;
          CHECK(rel_close(ms.normalized[p][q], ms.central[p][q] / std::pow(ms.raw[0][0], gamma), 1e-15));
        }
    }
  }

  TEST_CASE("matches the literal summation on random 8x8 patches") {
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
      auto img = glyphforge::testing::random_patch(rng, 8, 8);
      if (!img.any()) img.set(4, 4, true);
      const auto ms = compute_moments(img);
      for (int p = 0; p <= 3; ++p)
        for (int q = 0; p + q <= 3; ++q)
          CHECK(std::fabs(ms.central[p][q] - glyphforge::testing::literal_central_moment(img, p, q)) <= 1e-12);
    }
  }

  TEST_CASE("translation leaves central moments and invariants exactly unchanged") {
    const auto base = l_shape();
    const auto ms = compute_moments(base);
    for (auto [dx, dy] : {std::pair{3, 0}, std::pair{0, 7}, std::pair{9, 4}}) {
      const auto moved = compute_moments(glyphforge::testing::translate(base, dx, dy, 60, 60));
      for (int p = 0; p <= 3; ++p)
        for (int q = 0; p + q <= 3; ++q) CHECK(moved.central[p][q] == ms.central[p][q]);
      CHECK(hu_invariants(moved) == hu_invariants(ms));
    }
  }
}

TEST_SUITE("hu_invariants") {
  TEST_CASE("single pixel gives zeros") {
    BinaryImage img(3, 3);
    img.set(1, 1, true);
    const auto phi = hu_invariants(compute_moments(img));
    CHECK(std::all_of(phi.begin(), phi.end(), [](double v) { return v == 0.0; }));
  }

  TEST_CASE("solid centered square: only phi1 survives") {
    const auto img = glyphforge::testing::solid_rect(20, 20, 5, 5, 10, 10);
    const auto ms = compute_moments(img);
    // Direct summation: each axis contributes 10 * sum_{i=0..9} (i - 4.5)^2 = 825.
    CHECK(ms.central[2][0] == doctest::Approx(825.0));
    CHECK(ms.central[0][2] == doctest::Approx(825.0));
    const auto phi = hu_invariants(ms);
    CHECK(phi[0] == doctest::Approx(2.0 * 825.0 / 10000.0));
    for (int i = 1; i < 7; ++i) CHECK(std::fabs(phi[i]) <= 1e-9);
  }

  TEST_CASE("phi1 and phi2 are non-negative and all values finite") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
      auto img = glyphforge::testing::random_patch(rng, 10, 10, 0.3);
      img.set(5, 5, true);
      const auto phi = hu_invariants(compute_moments(img));
      CHECK(phi[0] >= 0.0);
      CHECK(phi[1] >= 0.0);
      CHECK(std::all_of(phi.begin(), phi.end(), [](double v) { return std::isfinite(v); }));
    }
  }

  TEST_CASE("exact lattice rotations preserve every invariant") {
    Rng rng(13);
    for (int trial = 0; trial < 40; ++trial) {
      auto img = glyphforge::testing::random_blobs(rng, 30, 24, 4);
      if (!img.any()) img.set(3, 3, true);
      const auto ref = hu_invariants(compute_moments(img));
      auto rot = img;
      for (int turn = 0; turn < 3; ++turn) {
        rot = glyphforge::testing::rotate90(rot);
        const auto phi = hu_invariants(compute_moments(rot));
        for (int i = 0; i < 7; ++i) CHECK(rel_close(phi[i], ref[i], 1e-6, 1e-15));
      }
    }
  }

  TEST_CASE("block upscaling preserves eta and phi within 1e-2") {
    const auto img = l_shape();
    const auto ms = compute_moments(img);
    const auto phi = hu_invariants(ms);
    for (int k : {2, 3}) {
      const auto big = compute_moments(glyphforge::testing::upscale(img, k));
      for (int p = 0; p <= 3; ++p)
        for (int q = 0; p + q <= 3; ++q)
          if (p + q >= 2) CHECK(rel_close(big.normalized[p][q], ms.normalized[p][q], 1e-2, 1e-15));
      const auto big_phi = hu_invariants(big);
      for (int i = 0; i < 7; ++i) CHECK(rel_close(big_phi[i], phi[i], 1e-2, 1e-15));
    }
  }

  TEST_CASE("rasterized 45-degree rotation of a large shape") {
    const auto a = filled_ellipse(480, 165, 75, 0.3, 12.0);
    const auto b = filled_ellipse(480, 165, 75, 0.3 + std::numbers::pi / 4, 12.0);
    const auto pa = hu_invariants(compute_moments(a));
    const auto pb = hu_invariants(compute_moments(b));
    for (int i = 0; i < 7; ++i) {
      INFO("phi", i + 1, " ", pa[i], " vs ", pb[i]);
      CHECK(rel_close(pa[i], pb[i], 5e-2, 1e-15));
    }
  }
}

TEST_SUITE("moment_zone_features") {
  TEST_CASE("empty image gives 63 zeros") {
    const auto f = moment_zone_features(BinaryImage(60, 60));
    CHECK(f.size() == 63);
    CHECK(std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; }));
  }

  TEST_CASE("glyph confined to the top-left zone") {
    BinaryImage img(60, 60);
    for (int i = 2; i < 18; ++i) img.set(i, i / 2 + 3, true);
    img.set(4, 15, true);
    const auto f = moment_zone_features(img);
    BinaryImage block(20, 20);
    for (int y = 0; y < 20; ++y)
      for (int x = 0; x < 20; ++x) block.set(x, y, img.at(x, y));
    const auto phi = hu_invariants(compute_moments(block));
    for (int i = 0; i < 7; ++i) CHECK(f[static_cast<std::size_t>(i)] == phi[static_cast<std::size_t>(i)]);
    CHECK(std::all_of(f.begin() + 7, f.end(), [](double v) { return v == 0.0; }));
  }

  TEST_CASE("full solid image: corner zones agree") {
    const auto f = moment_zone_features(BinaryImage(60, 60, true));
    const auto corner = hu_invariants(compute_moments(BinaryImage(20, 20, true)));
    for (int zone : {0, 2, 6, 8})
      for (int i = 0; i < 7; ++i) CHECK(f[static_cast<std::size_t>(zone * 7 + i)] == corner[static_cast<std::size_t>(i)]);
  }

  TEST_CASE("signed log scaling") {
    std::vector<double> v{0.0, -1.0, std::exp(1.0) - 1.0};
    signed_log(v);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == doctest::Approx(-std::log(2.0)));
    CHECK(v[2] == doctest::Approx(1.0));
  }

  TEST_CASE("size must split into three zones") {
    CHECK_THROWS_AS(moment_zone_features(BinaryImage(61, 60)), ExtractionError);
  }
}
