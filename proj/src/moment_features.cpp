#include "glyphforge/moment_features.hpp"

#include <algorithm>
#include <cmath>

#include "glyphforge/errors.hpp"

namespace glyphforge::moments {

MomentSet compute_moments(const BinaryImage& img) {
  MomentSet ms;
  int x0 = img.width(), y0 = img.height();
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      if (!img.at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      double xp = 1.0;
      for (int p = 0; p <= 3; ++p, xp *= x) {
        double yq = 1.0;
        for (int q = 0; p + q <= 3; ++q, yq *= y) ms.raw[p][q] += xp * yq;
      }
    }
  const double m00 = ms.raw[0][0];
  if (m00 == 0.0) throw EmptyGlyph("compute_moments: image has no foreground pixel");

  // Work in coordinates relative to the bounding-box corner: they are
  // identical for any translated copy of the glyph, which makes the central
  // moments translation-invariant bit for bit, not just up to rounding.
  double sx = 0.0, sy = 0.0;
  for (int y = y0; y < img.height(); ++y)
    for (int x = x0; x < img.width(); ++x)
      if (img.at(x, y)) {
        sx += x - x0;
        sy += y - y0;
      }
  const double lx = sx / m00;
  const double ly = sy / m00;
  ms.cx = x0 + lx;
  ms.cy = y0 + ly;

  // Direct summation about the centroid; the raw-moment expansion loses
  // precision badly for far-from-origin regions.
  for (int y = y0; y < img.height(); ++y)
    for (int x = x0; x < img.width(); ++x) {
      if (!img.at(x, y)) continue;
      const double dx = (x - x0) - lx;
      const double dy = (y - y0) - ly;
      double xp = 1.0;
      for (int p = 0; p <= 3; ++p, xp *= dx) {
        double yq = 1.0;
        for (int q = 0; p + q <= 3; ++q, yq *= dy) ms.central[p][q] += xp * yq;
      }
    }
  ms.central[0][0] = m00;
  ms.central[1][0] = 0.0;
  ms.central[0][1] = 0.0;

  for (int p = 0; p <= 3; ++p)
    for (int q = 0; p + q <= 3; ++q) {
      if (p + q < 2) continue;
      const double gamma = (p + q) / 2.0 + 1.0;
      ms.normalized[p][q] = ms.central[p][q] / std::pow(m00, gamma);
    }
  return ms;
}

HuInvariants hu_invariants(const MomentSet& ms) {
  const auto& n = ms.normalized;
  const double n20 = n[2][0], n02 = n[0][2], n11 = n[1][1];
  const double n30 = n[3][0], n03 = n[0][3], n21 = n[2][1], n12 = n[1][2];

  const double a = n30 - 3.0 * n12;  // (η30 − 3η12)
  const double b = 3.0 * n21 - n03;  // (3η21 − η03)
  const double s = n30 + n12;
  const double t = n21 + n03;

  HuInvariants phi{};
  phi[0] = n20 + n02;
  phi[1] = (n20 - n02) * (n20 - n02) + 4.0 * n11 * n11;
  phi[2] = a * a + b * b;
  phi[3] = s * s + t * t;
  phi[4] = a * s * (s * s - 3.0 * t * t) + b * t * (3.0 * s * s - t * t);
  phi[5] = (n20 - n02) * (s * s - t * t) + 4.0 * n11 * s * t;
  phi[6] = b * s * (s * s - 3.0 * t * t) - a * t * (3.0 * s * s - t * t);
  return phi;
}

std::vector<double> moment_zone_features(const BinaryImage& thinned) {
  if (thinned.width() % kZones != 0 || thinned.height() % kZones != 0 || thinned.width() == 0)
    throw ExtractionError("moment_zone_features: image sides must be positive multiples of 3");
  const int zw = thinned.width() / kZones;
  const int zh = thinned.height() / kZones;
  std::vector<double> out;
  out.reserve(kFeatureDim);
  for (int zy = 0; zy < kZones; ++zy)
    for (int zx = 0; zx < kZones; ++zx) {
      BinaryImage block(zw, zh);
      for (int y = 0; y < zh; ++y)
        for (int x = 0; x < zw; ++x) block.set(x, y, thinned.at(zx * zw + x, zy * zh + y));
      if (!block.any()) {
        out.insert(out.end(), 7, 0.0);
        continue;
      }
      const auto phi = hu_invariants(compute_moments(block));
      out.insert(out.end(), phi.begin(), phi.end());
    }
  return out;
}

void signed_log(std::vector<double>& values) {
  for (double& v : values) v = std::copysign(std::log1p(std::fabs(v)), v);
}

}  // namespace glyphforge::moments
