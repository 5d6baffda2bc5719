#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "glyphforge/chain_features.hpp"
#include "glyphforge/errors.hpp"
#include "glyphforge/image_prep.hpp"
#include "test_support.hpp"

using namespace glyphforge;
using namespace glyphforge::chain;

namespace {

// Moore-neighbour boundary following of one simple solid region, clockwise on
// screen, stopping on re-entry to the start pixel. Independent of the
// implementation; only valid for regions whose contour is a simple loop.
std::vector<int> moore_trace(const BinaryImage& img) {
  int sx = -1, sy = -1;
  for (int y = 0; y < img.height() && sx < 0; ++y)
    for (int x = 0; x < img.width(); ++x)
      if (img.at(x, y)) {
        sx = x;
        sy = y;
        break;
      }
  // Clockwise neighbour order on screen, starting west.
  const int cw[8] = {4, 3, 2, 1, 0, 7, 6, 5};
  std::vector<int> moves;
  int x = sx, y = sy;
  int back = 4;  // we "entered" from the west
  do {
    int start = 0;
    while (cw[start] != back) ++start;
    int found = -1;
    for (int i = 1; i <= 8; ++i) {
      const int d = cw[(start + i) % 8];
      if (img.get(x + kDx[d], y + kDy[d])) {
        found = d;
        break;
      }
    }
    if (found < 0) break;
    moves.push_back(found);
    x += kDx[found];
    y += kDy[found];
    // Resume the sweep just past the pixel we came from.
    back = (found + 4) % 8;
  } while (x != sx || y != sy);
  return moves;
}

std::size_t total_moves(const std::vector<ChainCode>& chains) {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.moves.size();
  return n;
}

}  // namespace

TEST_SUITE("trace_contours") {
  TEST_CASE("empty image") { CHECK(trace_contours(BinaryImage(60, 60)).empty()); }

  TEST_CASE("isolated pixel") {
    BinaryImage img(5, 5);
    img.set(2, 3, true);
    const auto chains = trace_contours(img);
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].moves.empty());
    CHECK(chains[0].start == Point{2, 3});
  }

  TEST_CASE("two adjacent pixels walk east then back west") {
    const auto chains = trace_contours(BinaryImage::from_rows({"....", ".##.", "...."}));
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].moves == std::vector<int>{0, 4});
  }

  TEST_CASE("3x3 square contour traces clockwise from top-left") {
    const auto contour = prep::find_contour(BinaryImage(3, 3, true));
    const auto chains = trace_contours(contour);
    REQUIRE(chains.size() == 1);
    const std::vector<int> expected{0, 0, 6, 6, 4, 4, 2, 2};
    CHECK(chains[0].moves == expected);
    CHECK(chains[0].start == Point{0, 0});
    CHECK(moore_trace(contour) == expected);
  }

  TEST_CASE("rectangles agree with an independent Moore tracer") {
    for (int w = 2; w <= 8; ++w)
      for (int h = 2; h <= 8; ++h) {
        const auto img = glyphforge::testing::solid_rect(w + 4, h + 4, 2, 1, w, h);
        const auto contour = prep::find_contour(img);
        const auto chains = trace_contours(contour);
        REQUIRE(chains.size() == 1);
        CHECK(chains[0].moves == moore_trace(contour));
      }
  }

  TEST_CASE("counterclockwise-first walks are flipped to clockwise") {
    // Topmost-leftmost pixel's only neighbours are SW and SE: a diamond.
    const auto img = BinaryImage::from_rows({
        "...#...",
        "..#.#..",
        ".#...#.",
        "..#.#..",
        "...#...",
    });
    const auto chains = trace_contours(img);
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].moves == std::vector<int>{7, 7, 5, 5, 3, 3, 1, 1});
  }

  TEST_CASE("separate components in scan order of their first pixel") {
    const auto img = BinaryImage::from_rows({
        "....##",
        "#...##",
        "#.....",
    });
    const auto chains = trace_contours(img);
    REQUIRE(chains.size() == 2);
    CHECK(chains[0].start == Point{4, 0});
    CHECK(chains[1].start == Point{0, 1});
    CHECK(chains[1].moves == std::vector<int>{6, 2});
  }

  TEST_CASE("a hole gives an extra chain") {
    const auto ring = BinaryImage::from_rows({
        "#######",
        "#######",
        "##...##",
        "##...##",
        "##...##",
        "#######",
        "#######",
    });
    BinaryImage padded = glyphforge::testing::translate(ring, 3, 3, 13, 13);
    // Thick ring: outer and inner contours are not 8-adjacent.
    const auto img = prep::find_contour(glyphforge::testing::upscale(padded, 2));
    const auto chains = trace_contours(img);
    CHECK(chains.size() == 2);
  }

  TEST_CASE("direction complement returns to origin") {
    for (int k = 0; k < 8; ++k) {
      const int back = (k + 4) % 8;
      CHECK(kDx[k] + kDx[back] == 0);
      CHECK(kDy[k] + kDy[back] == 0);
    }
  }

  TEST_CASE("walks are closed, stay on contour pixels, and cover every contour pixel once") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
      const auto blob = glyphforge::testing::random_blobs(rng, 60, 60, 1 + static_cast<int>(rng.below(6)));
      const auto contour = prep::find_contour(blob);
      const auto chains = trace_contours(contour);
      std::set<Point> visited;
      for (const auto& c : chains) {
        REQUIRE(c.moves.size() == c.move_origins.size());
        CHECK(c.end() == c.start);
        Point p = c.start;
        CHECK(contour.at(p.x, p.y));
        CHECK(visited.insert(p).second);
        for (std::size_t i = 0; i < c.moves.size(); ++i) {
          CHECK(c.move_origins[i] == p);
          p = {p.x + kDx[c.moves[i]], p.y + kDy[c.moves[i]]};
          REQUIRE(contour.in_bounds(p.x, p.y));
          CHECK(contour.at(p.x, p.y));
          if (!(p == c.start)) visited.insert(p);
        }
      }
      CHECK(visited.size() == contour.count());
      CHECK(trace_contours(contour).size() == chains.size());
    }
  }
}

TEST_SUITE("chain_histogram") {
  TEST_CASE("no chains") {
    const auto h = chain_histogram({});
    CHECK(h.size() == 200);
    CHECK(std::all_of(h.begin(), h.end(), [](double v) { return v == 0.0; }));
  }

  TEST_CASE("single east move at the origin") {
    ChainCode c{{0, 0}, {0}, {{0, 0}}};
    const auto h = chain_histogram({c});
    CHECK(h[0] == 1.0);
    CHECK(std::accumulate(h.begin(), h.end(), 0.0) == 1.0);
  }

  TEST_CASE("3x3 square inside zone (0,0)") {
    BinaryImage img(60, 60);
    for (int y = 2; y < 5; ++y)
      for (int x = 2; x < 5; ++x) img.set(x, y, true);
    const auto h = chain_histogram(trace_contours(prep::find_contour(img)));
    const std::vector<double> zone0(h.begin(), h.begin() + 8);
    CHECK(zone0 == std::vector<double>{2, 0, 2, 0, 2, 0, 2, 0});
    CHECK(std::accumulate(h.begin() + 8, h.end(), 0.0) == 0.0);
  }

  TEST_CASE("moves are binned by the origin's zone") {
    // A move from (11,0) east lands in zone 1 but counts for zone 0.
    ChainCode c{{11, 0}, {0}, {{11, 0}}};
    CHECK(chain_histogram({c})[0] == 1.0);
    ChainCode d{{12, 12}, {6}, {{12, 12}}};
    CHECK(chain_histogram({d})[(1 * 5 + 1) * 8 + 6] == 1.0);
    ChainCode e{{59, 59}, {4}, {{59, 59}}};
    CHECK(chain_histogram({e})[24 * 8 + 4] == 1.0);
  }

  TEST_CASE("out-of-bounds origin is an internal error") {
    ChainCode c{{60, 0}, {0}, {{60, 0}}};
    CHECK_THROWS_AS(chain_histogram({c}), ExtractionError);
    ChainCode d{{0, -1}, {0}, {{0, -1}}};
    CHECK_THROWS_AS(chain_histogram({d}), ExtractionError);
  }

  TEST_CASE("normalized histogram sums to one") {
    Rng rng(4);
    const auto contour = prep::find_contour(glyphforge::testing::random_blobs(rng, 60, 60, 4));
    const auto h = chain_histogram(trace_contours(contour), 60, true);
    CHECK(std::accumulate(h.begin(), h.end(), 0.0) == doctest::Approx(1.0));
  }

  TEST_CASE("conservation: histogram total equals move count") {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
      const auto contour = prep::find_contour(glyphforge::testing::random_blobs(rng, 60, 60, 5));
      const auto chains = trace_contours(contour);
      const auto h = chain_histogram(chains);
      CHECK(std::accumulate(h.begin(), h.end(), 0.0) == static_cast<double>(total_moves(chains)));
      CHECK(std::all_of(h.begin(), h.end(), [](double v) { return v >= 0.0; }));
    }
  }

  TEST_CASE("translating by one zone permutes zone blocks") {
    Rng rng(12);
    for (int trial = 0; trial < 30; ++trial) {
      const auto small = glyphforge::testing::random_blobs(rng, 36, 36, 3);
      const auto a = prep::find_contour(glyphforge::testing::translate(small, 0, 0, 60, 60));
      const auto b = prep::find_contour(glyphforge::testing::translate(small, 12, 12, 60, 60));
      const auto ha = chain_histogram(trace_contours(a));
      const auto hb = chain_histogram(trace_contours(b));
      for (int zy = 0; zy < 4; ++zy)
        for (int zx = 0; zx < 4; ++zx)
          for (int k = 0; k < 8; ++k)
            CHECK(ha[static_cast<std::size_t>((zy * 5 + zx) * 8 + k)] ==
                  hb[static_cast<std::size_t>(((zy + 1) * 5 + zx + 1) * 8 + k)]);
    }
  }
}
