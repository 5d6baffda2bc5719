#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/image.hpp"

namespace glyphforge {

enum class Extractor { kChain200, kMoment63 };

std::string_view extractor_name(Extractor e) noexcept;
/// Accepts "chain200" or "moment63"; throws FormatError otherwise.
Extractor parse_extractor(std::string_view name);
std::size_t extractor_dim(Extractor e) noexcept;

struct ExtractOptions {
  /// chain200: divide histogram by the total move count.
  bool normalize = false;
  /// moment63: signed log scaling of every invariant.
  bool log_moments = false;
  friend bool operator==(const ExtractOptions&, const ExtractOptions&) = default;
};

/// Intermediate images of one extraction, for --dump-stages.
struct ExtractStages {
  BinaryImage binary;
  BinaryImage normalized;
  /// Contour image for chain200, skeleton for moment63.
  BinaryImage shaped;
};

/// Runs the full preprocessing chain for `e` on a grayscale glyph.
/// Throws EmptyGlyph when binarization finds no foreground.
std::vector<double> extract_features(const GrayImage& img, Extractor e,
                                     const ExtractOptions& opts = {},
                                     ExtractStages* stages = nullptr);

}  // namespace glyphforge
