#pragma once

#include <cstdint>

#include "glyphforge/image.hpp"

namespace glyphforge::prep {

/// Side length of the canonical normalized glyph.
inline constexpr int kCanonicalSize = 60;

struct BinarizeResult {
  BinaryImage image;
  /// Pixels with intensity strictly below this value are foreground.
  int threshold = 0;
  /// Set when the input had a single intensity level; the image is then all background.
  bool uniform = false;
};

/// Otsu binarization: dark pixels become foreground.
BinarizeResult binarize(const GrayImage& img);

/// Crops to the foreground bounding box and stretches it to 60x60 by
/// nearest-neighbour sampling. Throws EmptyGlyph when nothing is set.
BinaryImage normalize_size(const BinaryImage& img, int size = kCanonicalSize);

/// Zhang-Suen thinning to a fixpoint.
///
/// Each sub-iteration gathers candidates in parallel as in the classic
/// algorithm, then commits them in scan order, re-checking the
/// neighbour-count and crossing-number conditions against the partially
/// updated image. The re-check keeps 2-pixel-thick strokes (which the
/// parallel rule erases entirely) from vanishing, so every 8-connected
/// component survives.
BinaryImage thin(const BinaryImage& img);

/// Foreground pixels with at least one 4-neighbour in the background.
/// Out-of-bounds neighbours count as background.
BinaryImage find_contour(const BinaryImage& img);

}  // namespace glyphforge::prep
