#include "glyphforge/features.hpp"

#include "glyphforge/chain_features.hpp"
#include "glyphforge/errors.hpp"
#include "glyphforge/image_prep.hpp"
#include "glyphforge/moment_features.hpp"

namespace glyphforge {

std::string_view extractor_name(Extractor e) noexcept {
  return e == Extractor::kChain200 ? "chain200" : "moment63";
}

Extractor parse_extractor(std::string_view name) {
  if (name == "chain200") return Extractor::kChain200;
  if (name == "moment63") return Extractor::kMoment63;
  throw FormatError("unknown extractor '" + std::string(name) + "'");
}

std::size_t extractor_dim(Extractor e) noexcept {
  return e == Extractor::kChain200 ? chain::kFeatureDim : moments::kFeatureDim;
}

std::vector<double> extract_features(const GrayImage& img, Extractor e,
                                     const ExtractOptions& opts, ExtractStages* stages) {
  auto bin = prep::binarize(img);
  if (bin.uniform) throw EmptyGlyph("image has a single intensity level; no glyph found");
  auto norm = prep::normalize_size(bin.image);

  std::vector<double> features;
  BinaryImage shaped;
  if (e == Extractor::kChain200) {
    shaped = prep::find_contour(norm);
    features = chain::chain_histogram(chain::trace_contours(shaped), prep::kCanonicalSize,
                                      opts.normalize);
  } else {
    shaped = prep::thin(norm);
    features = moments::moment_zone_features(shaped);
    if (opts.log_moments) moments::signed_log(features);
  }
  if (stages) *stages = {std::move(bin.image), std::move(norm), std::move(shaped)};
  return features;
}

}  // namespace glyphforge
