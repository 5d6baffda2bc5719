#include <array>
#include <cmath>

#include "doctest.h"
#include "glyphforge/errors.hpp"
#include "glyphforge/image_prep.hpp"
#include "test_support.hpp"

using namespace glyphforge;
using namespace glyphforge::prep;
using glyphforge::testing::count_components;
using glyphforge::testing::random_blobs;
using glyphforge::testing::subset_of;

namespace {

// Between-class variance of the split {v < t} | {v >= t}, straight from the
// definition.
double otsu_objective(const GrayImage& img, int t) {
  double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
  for (auto v : img.pixels()) {
    if (v < t) {
      n0 += 1;
      s0 += v;
    } else {
      n1 += 1;
      s1 += v;
    }
  }
  if (n0 == 0 || n1 == 0) return 0.0;
  const double d = s0 / n0 - s1 / n1;
  return n0 * n1 * d * d;
}

}  // namespace

TEST_SUITE("binarize") {
  TEST_CASE("uniform white image has no object") {
    const auto r = binarize(GrayImage(8, 8, 255));
    CHECK(r.uniform);
    CHECK(r.image.count() == 0);
  }

  TEST_CASE("two-level image: threshold strictly between levels, dark is foreground") {
    GrayImage img(10, 10, 200);
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 10; ++x) img.at(x, y) = 50;
    const auto r = binarize(img);
    CHECK_FALSE(r.uniform);
    CHECK(r.threshold > 50);
    CHECK(r.threshold < 200);
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x) CHECK(r.image.at(x, y) == (y < 5));

    double best = 0;
    for (int t = 0; t <= 256; ++t) best = std::max(best, otsu_objective(img, t));
    CHECK(otsu_objective(img, r.threshold) == doctest::Approx(best).epsilon(1e-12));
  }

  TEST_CASE("chosen threshold maximizes between-class variance on random images") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      GrayImage img(9, 7);
      for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 9; ++x) img.at(x, y) = static_cast<std::uint8_t>(rng.below(256));
      const auto r = binarize(img);
      double best = 0;
      for (int t = 0; t <= 256; ++t) best = std::max(best, otsu_objective(img, t));
      CHECK(otsu_objective(img, r.threshold) == doctest::Approx(best).epsilon(1e-9));
    }
  }

  TEST_CASE("{0,255} image: foreground is exactly the black pixels, and binarize is idempotent") {
    Rng rng(3);
    const auto bin = random_blobs(rng, 20, 20, 4);
    const auto r = binarize(to_gray(bin));
    CHECK(r.image == bin);
    CHECK(binarize(to_gray(r.image)).image == r.image);
  }
}

TEST_SUITE("normalize_size") {
  TEST_CASE("output is always 60x60 with foreground") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      const int w = rng.between(1, 130), h = rng.between(1, 130);
      auto img = random_blobs(rng, w, h, 3);
      if (!img.any()) img.set(0, 0, true);
      const auto out = normalize_size(img);
      CHECK(out.width() == 60);
      CHECK(out.height() == 60);
      CHECK(count_components(out) >= 1);
    }
  }

  TEST_CASE("single pixel stretches to full canvas") {
    BinaryImage img(7, 9);
    img.set(3, 4, true);
    CHECK(normalize_size(img).count() == 3600);
  }

  TEST_CASE("centered 60x60 square in 120x120") {
    const auto img = glyphforge::testing::solid_rect(120, 120, 30, 30, 60, 60);
    CHECK(normalize_size(img).count() == 3600);
  }

  TEST_CASE("sparse box downscaled never comes out empty") {
    BinaryImage img(400, 1);
    img.set(0, 0, true);
    img.set(399, 0, true);
    CHECK(normalize_size(img).any());
  }

  TEST_CASE("empty image") { CHECK_THROWS_AS(normalize_size(BinaryImage(5, 5)), EmptyGlyph); }

  TEST_CASE("nearest-neighbour 2x upscale duplicates pixels") {
    const auto img = BinaryImage::from_rows({"#.", ".#"});
    const auto out = normalize_size(img, 4);
    CHECK(out == BinaryImage::from_rows({"##..", "##..", "..##", "..##"}));
  }
}

TEST_SUITE("thin") {
  TEST_CASE("trivial inputs") {
    CHECK(thin(BinaryImage(6, 6)) == BinaryImage(6, 6));
    BinaryImage dot(5, 5);
    dot.set(2, 2, true);
    CHECK(thin(dot) == dot);
  }

  TEST_CASE("3x15 bar thins to its midline") {
    const auto bar = glyphforge::testing::solid_rect(19, 7, 2, 2, 15, 3);
    const auto t = thin(bar);
    CHECK(subset_of(t, bar));
    CHECK(count_components(t) == 1);
    int on_mid = 0;
    for (int x = 0; x < 19; ++x) {
      int column = 0;
      for (int y = 0; y < 7; ++y) column += t.at(x, y);
      CHECK(column <= 1);
      on_mid += t.at(x, 3);
    }
    // A run along row 3 covering most of the bar.
    CHECK(on_mid >= 11);
    CHECK(t.count() <= 15);
  }

  TEST_CASE("2x2 block does not vanish") {
    const auto sq = glyphforge::testing::solid_rect(6, 6, 2, 2, 2, 2);
    const auto t = thin(sq);
    CHECK(t.any());
    CHECK(count_components(t) == 1);
  }

  TEST_CASE("subset, idempotent, and component-preserving on random blobs") {
    Rng rng(17);
    for (int trial = 0; trial < 60; ++trial) {
      const auto img = random_blobs(rng, 40, 40, 5);
      const auto t = thin(img);
      CHECK(subset_of(t, img));
      CHECK(thin(t) == t);
      CHECK(count_components(t) == count_components(img));
      CHECK(thin(img) == t);
    }
  }

  TEST_CASE("full 60x60 canvas keeps a skeleton") {
    const auto t = thin(BinaryImage(60, 60, true));
    CHECK(t.any());
    CHECK(count_components(t) == 1);
  }
}

TEST_SUITE("find_contour") {
  TEST_CASE("single pixel") {
    BinaryImage img(3, 3);
    img.set(1, 1, true);
    CHECK(find_contour(img) == img);
  }

  TEST_CASE("solid 3x3 square: ring of 8") {
    const auto c = find_contour(BinaryImage(3, 3, true));
    CHECK(c.count() == 8);
    CHECK_FALSE(c.at(1, 1));
  }

  TEST_CASE("solid 5x5 square agrees with 4-neighbour enumeration") {
    const auto img = glyphforge::testing::solid_rect(9, 9, 2, 2, 5, 5);
    const auto c = find_contour(img);
    int expected = 0;
    for (int y = 0; y < 9; ++y)
      for (int x = 0; x < 9; ++x) {
        if (!img.at(x, y)) continue;
        const std::array<std::pair<int, int>, 4> n4 = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
        bool border = false;
        for (auto [dx, dy] : n4) border = border || !img.get(x + dx, y + dy);
        expected += border;
        CHECK(c.at(x, y) == border);
      }
    CHECK(expected == 16);
    CHECK(c.count() == 16);
    for (int y = 3; y <= 5; ++y)
      for (int x = 3; x <= 5; ++x) CHECK_FALSE(c.at(x, y));
  }

  TEST_CASE("rectangles: contour count equals perimeter pixel count") {
    for (int w = 3; w <= 9; ++w)
      for (int h = 3; h <= 9; ++h) {
        const auto img = glyphforge::testing::solid_rect(w + 4, h + 4, 2, 2, w, h);
        CHECK(find_contour(img).count() == static_cast<std::size_t>(2 * w + 2 * h - 4));
      }
  }

  TEST_CASE("border pixels touch out-of-bounds background") {
    CHECK(find_contour(BinaryImage(4, 4, true)).count() == 12);
  }

  TEST_CASE("contour is a subset of the input") {
    Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
      const auto img = random_blobs(rng, 30, 30, 4);
      CHECK(subset_of(find_contour(img), img));
    }
  }
}
