#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "glyphforge/image.hpp"

namespace glyphforge::chain {

/// Freeman directions, counterclockwise from east in screen coordinates
/// (y grows downward): 0=E 1=NE 2=N 3=NW 4=W 5=SW 6=S 7=SE.
inline constexpr std::array<int, 8> kDx = {1, 1, 0, -1, -1, -1, 0, 1};
inline constexpr std::array<int, 8> kDy = {0, -1, -1, -1, 0, 1, 1, 1};

inline constexpr int kZones = 5;
inline constexpr int kFeatureDim = kZones * kZones * 8;

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

struct ChainCode {
  Point start;
  std::vector<int> moves;
  /// Pixel each move departs from; moves.size() == move_origins.size().
  std::vector<Point> move_origins;

  /// Pixel reached after replaying every move.
  Point end() const;
};

/// Traces every 8-connected component of a contour image as one closed walk.
///
/// Components start at their topmost-leftmost pixel, in scan order. The first
/// move takes the smallest available code; later moves prefer the sharpest
/// left turn relative to the incoming heading among unvisited contour
/// neighbours. A walk with nowhere new to go closes onto the start pixel when
/// the component is exhausted and the start is adjacent, otherwise it steps
/// back along its own path. Walks with negative orientation are reversed so
/// every trace runs clockwise on screen.
std::vector<ChainCode> trace_contours(const BinaryImage& contour);

/// Zone-major (5x5 row-major), direction-minor histogram of chain moves,
/// binned by the zone of each move's origin pixel. With `normalize` the
/// counts are divided by the total number of moves.
std::vector<double> chain_histogram(const std::vector<ChainCode>& chains,
                                    int image_size = 60, bool normalize = false);

}  // namespace glyphforge::chain
