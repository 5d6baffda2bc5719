#include "glyphforge/image_prep.hpp"

#include <array>
#include <utility>
#include <vector>

#include "glyphforge/errors.hpp"

namespace glyphforge::prep {

BinarizeResult binarize(const GrayImage& img) {
  if (img.empty()) throw ShapeError("binarize: empty image");

  std::array<double, 256> hist{};
  for (auto v : img.pixels()) hist[v] += 1.0;
  const double total = static_cast<double>(img.pixels().size());
  double total_sum = 0.0;
  for (int v = 0; v < 256; ++v) total_sum += v * hist[v];

  // Split {v < t} | {v >= t} for t in 1..255. Keep the whole plateau of
  // maximizers and report its midpoint so two-level images get a threshold
  // strictly between their levels.
  double best = 0.0;
  int best_lo = -1;
  int best_hi = -1;
  double w0 = 0.0;
  double sum0 = 0.0;
  for (int t = 1; t < 256; ++t) {
    w0 += hist[t - 1];
    sum0 += (t - 1) * hist[t - 1];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (total_sum - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best * (1.0 + 1e-12) + 1e-300) {
      best = between;
      best_lo = best_hi = t;
    } else if (best_lo >= 0 && between >= best * (1.0 - 1e-12)) {
      best_hi = t;
    }
  }

  BinarizeResult out{BinaryImage(img.width(), img.height()), 0, false};
  if (best_lo < 0) {
    out.uniform = true;
    return out;
  }
  out.threshold = (best_lo + best_hi + 1) / 2;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      out.image.set(x, y, img.at(x, y) < out.threshold);
  return out;
}

BinaryImage normalize_size(const BinaryImage& img, int size) {
  int x0 = img.width(), y0 = img.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (img.at(x, y)) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
  if (x1 < 0) throw EmptyGlyph("normalize_size: image has no foreground pixel");

  const long bw = x1 - x0 + 1;
  const long bh = y1 - y0 + 1;
  BinaryImage out(size, size);
  for (int oy = 0; oy < size; ++oy) {
    const int sy = y0 + static_cast<int>((2L * oy + 1) * bh / (2L * size));
    for (int ox = 0; ox < size; ++ox) {
      const int sx = x0 + static_cast<int>((2L * ox + 1) * bw / (2L * size));
      out.set(ox, oy, img.at(sx, sy));
    }
  }
  // Heavy downscaling of a sparse box can skip every foreground sample; keep
  // the top-left corner pixel's image so the output is never empty.
  if (!out.any()) {
    for (int x = x0; x <= x1; ++x)
      if (img.at(x, y0)) {
        out.set(static_cast<int>((x - x0) * size / bw), 0, true);
        break;
      }
  }
  return out;
}

namespace {

// Neighbours P2..P9 clockwise from north, in the usual Zhang-Suen numbering.
constexpr std::array<std::pair<int, int>, 8> kRing = {{
    {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}}};

struct Neighbourhood {
  std::array<int, 8> p{};  // p[0] = P2 ... p[7] = P9
  int count = 0;
  int transitions = 0;
};

Neighbourhood neighbourhood(const BinaryImage& img, int x, int y) {
  Neighbourhood n;
  for (std::size_t i = 0; i < kRing.size(); ++i) {
    n.p[i] = img.get(x + kRing[i].first, y + kRing[i].second) ? 1 : 0;
    n.count += n.p[i];
  }
  for (std::size_t i = 0; i < 8; ++i)
    if (n.p[i] == 0 && n.p[(i + 1) % 8] == 1) ++n.transitions;
  return n;
}

bool removable(const Neighbourhood& n) {
  return n.count >= 2 && n.count <= 6 && n.transitions == 1;
}

bool candidate(const Neighbourhood& n, int pass) {
  if (!removable(n)) return false;
  const int p2 = n.p[0], p4 = n.p[2], p6 = n.p[4], p8 = n.p[6];
  if (pass == 0) return p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0;
  return p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0;
}

}  // namespace

BinaryImage thin(const BinaryImage& img) {
  BinaryImage out = img;
  std::vector<std::pair<int, int>> marked;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      marked.clear();
      for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x)
          if (out.at(x, y) && candidate(neighbourhood(out, x, y), pass))
            marked.emplace_back(x, y);
      for (auto [x, y] : marked) {
        if (!removable(neighbourhood(out, x, y))) continue;
        out.set(x, y, false);
        changed = true;
      }
    }
  }
  return out;
}

BinaryImage find_contour(const BinaryImage& img) {
  BinaryImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (img.at(x, y) && (!img.get(x + 1, y) || !img.get(x - 1, y) ||
                           !img.get(x, y + 1) || !img.get(x, y - 1)))
        out.set(x, y, true);
  return out;
}

}  // namespace glyphforge::prep
