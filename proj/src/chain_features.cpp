#include "glyphforge/chain_features.hpp"

#include <algorithm>
#include <string>

#include "glyphforge/errors.hpp"

namespace glyphforge::chain {

Point ChainCode::end() const {
  Point p = start;
  for (int m : moves) {
    p.x += kDx[m];
    p.y += kDy[m];
  }
  return p;
}

namespace {

int direction_between(Point from, Point to) {
  for (int k = 0; k < 8; ++k)
    if (from.x + kDx[k] == to.x && from.y + kDy[k] == to.y) return k;
  return -1;
}

std::size_t component_size(const BinaryImage& img, Point seed) {
  BinaryImage seen(img.width(), img.height());
  std::vector<Point> stack{seed};
  seen.set(seed.x, seed.y, true);
  std::size_t n = 0;
  while (!stack.empty()) {
    const Point p = stack.back();
    stack.pop_back();
    ++n;
    for (int k = 0; k < 8; ++k) {
      const int nx = p.x + kDx[k], ny = p.y + kDy[k];
      if (img.get(nx, ny) && !seen.at(nx, ny)) {
        seen.set(nx, ny, true);
        stack.push_back({nx, ny});
      }
    }
  }
  return n;
}

// Twice the signed shoelace area of the walk; positive means clockwise on
// screen since y points down.
long long signed_area2(const ChainCode& c) {
  long long a = 0;
  Point p = c.start;
  for (int m : c.moves) {
    const Point q{p.x + kDx[m], p.y + kDy[m]};
    a += static_cast<long long>(p.x) * q.y - static_cast<long long>(q.x) * p.y;
    p = q;
  }
  return a;
}

void reverse_walk(ChainCode& c) {
  std::vector<int> moves(c.moves.rbegin(), c.moves.rend());
  for (int& m : moves) m = (m + 4) % 8;
  ChainCode r{c.start, std::move(moves), {}};
  Point p = r.start;
  for (int m : r.moves) {
    r.move_origins.push_back(p);
    p = {p.x + kDx[m], p.y + kDy[m]};
  }
  c = std::move(r);
}

ChainCode trace_component(const BinaryImage& img, BinaryImage& visited, Point start) {
  const std::size_t total = component_size(img, start);
  std::size_t seen = 1;
  visited.set(start.x, start.y, true);

  ChainCode chain{start, {}, {}};
  std::vector<Point> path{start};
  int heading = -1;

  auto step = [&](Point from, int dir) {
    chain.moves.push_back(dir);
    chain.move_origins.push_back(from);
    heading = dir;
  };

  while (true) {
    const Point cur = path.back();
    int next = -1;
    if (heading < 0) {
      for (int k = 0; k < 8 && next < 0; ++k) {
        const int nx = cur.x + kDx[k], ny = cur.y + kDy[k];
        if (img.get(nx, ny) && !visited.at(nx, ny)) next = k;
      }
    } else {
      for (int turn : {2, 1, 0, -1, -2, -3}) {
        const int k = (heading + turn + 8) % 8;
        const int nx = cur.x + kDx[k], ny = cur.y + kDy[k];
        if (img.get(nx, ny) && !visited.at(nx, ny)) {
          next = k;
          break;
        }
      }
    }

    if (next >= 0) {
      const Point to{cur.x + kDx[next], cur.y + kDy[next]};
      visited.set(to.x, to.y, true);
      ++seen;
      step(cur, next);
      path.push_back(to);
      continue;
    }

    if (path.size() == 1) break;
    const int home = direction_between(cur, start);
    if (seen == total && home >= 0) {
      step(cur, home);
      break;
    }
    path.pop_back();
    step(cur, direction_between(cur, path.back()));
  }

  if (signed_area2(chain) < 0) reverse_walk(chain);
  return chain;
}

}  // namespace

std::vector<ChainCode> trace_contours(const BinaryImage& contour) {
  std::vector<ChainCode> chains;
  BinaryImage visited(contour.width(), contour.height());
  for (int y = 0; y < contour.height(); ++y)
    for (int x = 0; x < contour.width(); ++x)
      if (contour.at(x, y) && !visited.at(x, y))
        chains.push_back(trace_component(contour, visited, {x, y}));
  return chains;
}

std::vector<double> chain_histogram(const std::vector<ChainCode>& chains, int image_size,
                                    bool normalize) {
  if (image_size < kZones || image_size % kZones != 0)
    throw ExtractionError("chain_histogram: image size must be a positive multiple of 5");
  const int zone = image_size / kZones;
  std::vector<double> hist(kFeatureDim, 0.0);
  std::size_t total = 0;
  for (const auto& c : chains) {
    if (c.moves.size() != c.move_origins.size())
      throw ExtractionError("chain_histogram: moves and origins differ in length");
    for (std::size_t i = 0; i < c.moves.size(); ++i) {
      const Point o = c.move_origins[i];
      const int m = c.moves[i];
      if (o.x < 0 || o.y < 0 || o.x >= image_size || o.y >= image_size)
        throw ExtractionError("chain_histogram: move origin (" + std::to_string(o.x) + "," +
                              std::to_string(o.y) + ") out of bounds");
      if (m < 0 || m > 7) throw ExtractionError("chain_histogram: invalid direction code");
      const int z = (o.y / zone) * kZones + o.x / zone;
      hist[static_cast<std::size_t>(z * 8 + m)] += 1.0;
      ++total;
    }
  }
  if (normalize && total > 0)
    for (double& v : hist) v /= static_cast<double>(total);
  return hist;
}

}  // namespace glyphforge::chain
