#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glyphforge/dataset_io.hpp"
#include "glyphforge/ensemble.hpp"
#include "glyphforge/mlp.hpp"

namespace glyphforge::eval {

// ---------------------------------------------------------------- splitting

enum class SplitMode { kFixed, kKFold };

struct SplitPlan {
  SplitMode mode = SplitMode::kKFold;
  double train_fraction = 0.65;
  std::size_t folds = 3;
  std::uint64_t seed = 0;
  bool stratified = true;

  /// Throws SplitError on an out-of-range fraction or fold count.
  void validate() const;
};

struct Partition {
  std::vector<std::size_t> train;  // ascending sample indices
  std::vector<std::size_t> test;
};

/// Fixed-fraction split. round(N * train_fraction) samples go to training;
/// in stratified mode each class receives floor or ceil of its exact share
/// (largest-remainder apportionment).
Partition split_fixed(std::span<const std::string> labels, const SplitPlan& plan);

/// Disjoint folds covering every sample; fold sizes differ by at most one.
/// Stratified folds deal each shuffled class round-robin, continuing the
/// deal across classes. Throws SplitError naming any class with fewer
/// samples than folds.
std::vector<std::vector<std::size_t>> split_folds(std::span<const std::string> labels,
                                                  const SplitPlan& plan);

// --------------------------------------------------------------- evaluation

inline constexpr std::array<int, 3> kTopK = {1, 3, 5};

struct ConfusedPair {
  std::string truth;
  std::string predicted;
  std::size_t count = 0;
};

struct EvalReport {
  std::size_t n_samples = 0;
  std::map<int, double> top_k_accuracy;
  std::vector<std::string> labels;
  /// confusion[true][predicted top-1]
  std::vector<std::vector<std::size_t>> confusion;
  /// Non-zero off-diagonal cells by count descending, then row, then column.
  std::vector<ConfusedPair> confused_pairs;
};

/// Returns the ranked class indices for test item i.
using Predictor = std::function<std::vector<std::size_t>(std::size_t)>;

/// A test item counts as a top-k hit when its label is among the first k
/// ranked classes. Throws LabelError for a label missing from `class_table`
/// and ShapeError for an empty test set.
EvalReport evaluate(const Predictor& predict, std::span<const std::string> truth,
                    std::span<const std::string> class_table);

/// Ranked class indices from a ranked (index, score) list.
std::vector<std::size_t> indices_of(const std::vector<mlp::RankedClass>& ranked);

/// Throws LabelError when `label` is not in the table.
std::size_t label_index(std::span<const std::string> class_table, const std::string& label);

// ------------------------------------------------------ training experiments

struct TrainSpec {
  /// Hyperparameters; input/output sizes are filled from the data.
  mlp::MlpConfig chain_config;
  mlp::MlpConfig moment_config;
  /// Share of each training partition held out to measure fusion weights.
  double calib_fraction = 0.2;
  std::uint64_t seed = 0;

  TrainSpec();
};

struct FittedModels {
  std::vector<mlp::MlpModel> members;  // one per feature view
  std::vector<mlp::TrainingReport> reports;
  std::optional<ensemble::FusionWeights> weights;  // set when two views are given
  std::size_t n_fit = 0;
  std::size_t n_calib = 0;
};

/// Trains one MLP per view on `indices` (all rows when empty). With two
/// views (chain200 first, then moment63) a stratified calibration share is
/// held out first and the fusion weights are measured on it.
FittedModels fit_models(const std::vector<data::FeatureTable>& views,
                        std::span<const std::string> class_table,
                        std::span<const std::size_t> indices, const TrainSpec& spec,
                        std::uint64_t stream = 0);

struct FoldResult {
  std::size_t fold = 0;
  std::size_t n_train = 0;
  std::size_t n_calib = 0;
  std::size_t n_test = 0;
  /// Row indices used for training (fit and calibration) and for testing.
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  std::optional<ensemble::FusionWeights> weights;
  std::vector<double> final_mse;
  /// Keyed by classifier name: the extractor ids, plus "fused".
  std::map<std::string, EvalReport> reports;
};

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for one fold
};

struct ProtocolReport {
  SplitPlan plan;
  std::vector<std::string> labels;
  std::vector<FoldResult> folds;
  /// classifier -> k -> mean/stddev of top-k accuracy across folds
  std::map<std::string, std::map<int, MeanStd>> aggregate;
};

/// Runs the plan's protocol (one fixed split, or every fold of a k-fold
/// split) over row-aligned feature views.
ProtocolReport run_protocol(const std::vector<data::FeatureTable>& views, const SplitPlan& plan,
                            const TrainSpec& spec);

/// k-fold cross-validation; throws SplitError unless plan.mode is kKFold.
ProtocolReport cross_validate(const std::vector<data::FeatureTable>& views,
                              const SplitPlan& plan, const TrainSpec& spec);

/// Checks that views line up row by row and carry the supported extractor order.
void check_views(const std::vector<data::FeatureTable>& views);

// ------------------------------------------------------------------ reports

std::string report_json(const EvalReport& r);
std::string protocol_json(const ProtocolReport& r);
std::string report_text(const EvalReport& r, std::size_t max_pairs = 10);
std::string protocol_text(const ProtocolReport& r);
/// m x m matrix with a header row of labels and the true label first in each row.
std::string confusion_csv(const EvalReport& r);

}  // namespace glyphforge::eval
