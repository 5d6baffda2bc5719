#pragma once

#include <array>
#include <vector>

#include "glyphforge/image.hpp"

namespace glyphforge::moments {

inline constexpr int kZones = 3;
inline constexpr int kFeatureDim = kZones * kZones * 7;

/// Moments of a binary region up to order 3, indexed [p][q] with p + q <= 3.
/// Coordinates are pixel centres: column index is x, row index is y.
struct MomentSet {
  std::array<std::array<double, 4>, 4> raw{};
  double cx = 0.0;
  double cy = 0.0;
  std::array<std::array<double, 4>, 4> central{};
  /// Filled for p + q in {2, 3}; other entries are zero.
  std::array<std::array<double, 4>, 4> normalized{};
};

using HuInvariants = std::array<double, 7>;

/// Throws EmptyGlyph when the image has no foreground pixel.
MomentSet compute_moments(const BinaryImage& img);

/// Seven Hu invariants from the normalized central moments.
HuInvariants hu_invariants(const MomentSet& ms);

/// Hu invariants of each 20x20 block of a 60x60 skeleton in block-local
/// coordinates, zone-major. Empty blocks contribute zeros.
std::vector<double> moment_zone_features(const BinaryImage& thinned);

/// sign(v) * log(1 + |v|), applied element-wise in place.
void signed_log(std::vector<double>& values);

}  // namespace glyphforge::moments
