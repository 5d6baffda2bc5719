#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "glyphforge/ensemble.hpp"
#include "glyphforge/mlp.hpp"

namespace glyphforge::model_io {

/// Model file layout (text, one record per line):
///
///   format glyphforge-mlp
///   version 1
///   extractor <chain200|moment63|generic>
///   normalize <0|1>
///   log_moments <0|1>
///   input_size / hidden_size / output_size <n>
///   learning_rate / momentum / target_mse <real>
///   max_epochs / seed <n>
///   fusion none | fusion <success_rate> <weight>
///   labels <n>, then n lines "label <name>"
///   scaler <n>, then (if n > 0) one line of minima and one of maxima
///   w1 <rows> <cols>, b1 <n>, w2 <rows> <cols>, b2 <n>; each followed by
///   one line per row of space-separated values
///   end
///
/// Reals use 17 significant digits, so a round trip is exact.
void write_model(std::ostream& out, const mlp::MlpModel& model);
mlp::MlpModel read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const mlp::MlpModel& model);
mlp::MlpModel load_model(const std::filesystem::path& path);

/// Ensemble file: members referenced by path relative to the ensemble file.
///
///   format glyphforge-ensemble
///   version 1
///   member1 <relative path>
///   member2 <relative path>
///   d1 / d2 / w1 / w2 <real>
///   end
void save_ensemble(const std::filesystem::path& path, const ensemble::EnsembleModel& model,
                   const std::string& member1_rel, const std::string& member2_rel);
ensemble::EnsembleModel load_ensemble(const std::filesystem::path& path);

/// "glyphforge-mlp", "glyphforge-ensemble", or "" when unrecognised.
std::string sniff_format(const std::filesystem::path& path);

/// Shortest "%.17g" rendering shared by every text format.
std::string format_real(double v);
double parse_real(const std::string& token);

}  // namespace glyphforge::model_io
