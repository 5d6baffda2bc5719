#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "glyphforge/image.hpp"

namespace glyphforge::data {

struct LabeledSample {
  std::string id;  // path relative to the corpus root, '/'-separated
  std::string label;
  GrayImage image;
};

struct Corpus {
  std::vector<LabeledSample> samples;
  /// Files skipped in non-strict mode, with the reason.
  std::vector<std::string> warnings;
};

/// Loads `<root>/<class>/<sample>.pgm` in lexicographic order. Malformed
/// files are skipped with a warning unless `strict`, in which case the
/// first one is rethrown with its path. Throws CorpusError when the root
/// is missing or yields no samples.
Corpus load_corpus(const std::filesystem::path& root, bool strict = false);

struct FeatureRow {
  std::string id;
  std::string label;
  std::vector<double> values;
  friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

struct FeatureTable {
  std::string extractor_id;
  std::size_t dim = 0;
  std::vector<FeatureRow> rows;

  /// Throws FormatError on an unknown extractor, a dim that does not match
  /// it, or a row of the wrong length.
  void validate() const;
  friend bool operator==(const FeatureTable&, const FeatureTable&) = default;
};

/// CSV layout:
///   # extractor=<id> dim=<n>
///   id,label,v1,...,vn          (column header)
///   <id>,<label>,<v1>,...,<vn>  (one line per row, 17 significant digits)
void save_features(const std::filesystem::path& path, const FeatureTable& table);
FeatureTable load_features(const std::filesystem::path& path);

/// Sorted distinct labels.
std::vector<std::string> class_table(const std::vector<std::string>& labels);

/// Reorders `other` so its ids line up with `reference`; throws FormatError
/// when the id sets or labels differ.
FeatureTable align_to(const FeatureTable& reference, const FeatureTable& other);

struct SynthOptions {
  int classes = 20;
  int per_class = 75;
  std::uint64_t seed = 0;
};

/// Synthetic polyline glyphs on a 64x64 white canvas, strokes 3 px wide.
/// Class templates depend only on the class index; the seed drives the
/// per-instance translation (+-4 px), scale (+-15%) and vertex jitter (+-2 px).
std::vector<LabeledSample> synth_corpus(const SynthOptions& opts);

/// The unperturbed rendering of class `cls`.
GrayImage synth_template(int cls);

std::string synth_class_name(int cls);

/// Writes samples under `<root>/<label>/<basename of id>`.
void write_corpus(const std::filesystem::path& root, const std::vector<LabeledSample>& samples);

}  // namespace glyphforge::data
