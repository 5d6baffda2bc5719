#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "glyphforge/features.hpp"

namespace glyphforge::mlp {

struct MlpConfig {
  std::size_t input_size = 200;
  std::size_t hidden_size = 50;
  std::size_t output_size = 20;
  double learning_rate = 0.8;
  double momentum = 0.7;
  std::size_t max_epochs = 1000;
  double target_mse = 1e-3;
  std::uint64_t seed = 0;

  /// Throws ShapeError on an invalid configuration.
  void validate() const;
  friend bool operator==(const MlpConfig&, const MlpConfig&) = default;
};

/// Hidden-layer width used for each extractor by default.
std::size_t default_hidden_size(Extractor e) noexcept;

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// Per-dimension min-max scaling to [0, 1] fitted on training data.
/// An empty scaler is the identity. Constant dimensions map to 0.
struct MinMaxScaler {
  std::vector<double> lo;
  std::vector<double> hi;

  bool empty() const noexcept { return lo.empty(); }
  static MinMaxScaler fit(std::span<const std::vector<double>> rows);
  std::vector<double> apply(std::span<const double> x) const;

  friend bool operator==(const MinMaxScaler&, const MinMaxScaler&) = default;
};

/// Success rate and fusion weight stored in a member model of an ensemble.
struct FusionSlot {
  double success_rate = 0.0;
  double weight = 0.0;
  friend bool operator==(const FusionSlot&, const FusionSlot&) = default;
};

struct MlpModel {
  MlpConfig config;
  Matrix w1;  // hidden x input
  std::vector<double> b1;
  Matrix w2;  // output x hidden
  std::vector<double> b2;
  std::vector<std::string> labels;

  // Metadata carried through the model file.
  std::string extractor;
  ExtractOptions extract_options;
  MinMaxScaler scaler;
  std::optional<FusionSlot> fusion;

  /// Throws ShapeError when dimensions disagree with the config or a weight
  /// is not finite.
  void validate() const;
  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

/// Weights uniform in [-r, r], r = sqrt(6 / (fan_in + fan_out)); biases zero.
/// Labels default to "0", "1", ...
MlpModel init_model(const MlpConfig& config);

/// Sigmoid confidences, one per class, each in (0, 1). Applies the model's
/// scaler first. Throws ShapeError on a length mismatch.
std::vector<double> forward(const MlpModel& model, std::span<const double> x);

struct RankedClass {
  std::size_t index = 0;
  double score = 0.0;
};

/// Classes by descending score; ties by ascending class index.
std::vector<RankedClass> rank(std::span<const double> scores);

std::vector<RankedClass> predict(const MlpModel& model, std::span<const double> x);

struct LabeledVector {
  std::vector<double> x;
  std::size_t label = 0;
};

struct TrainingReport {
  /// Mean of (target - output)^2 over samples and outputs, measured during
  /// each online pass.
  std::vector<double> epoch_mse;
  bool converged = false;
  double final_mse() const { return epoch_mse.empty() ? 0.0 : epoch_mse.back(); }
};

/// Online backpropagation with momentum on one-hot targets. The sample order
/// is reshuffled every epoch from a generator seeded by config.seed. Stops
/// after max_epochs or once an epoch's MSE is at most target_mse.
TrainingReport train(MlpModel& model, std::span<const LabeledVector> data);

struct Gradients {
  Matrix w1;
  std::vector<double> b1;
  Matrix w2;
  std::vector<double> b2;
};

/// Gradient of 0.5 * sum((target - output)^2) for one (unscaled) input.
Gradients loss_gradient(const MlpModel& model, std::span<const double> x,
                        std::span<const double> target);

double sample_loss(const MlpModel& model, std::span<const double> x,
                   std::span<const double> target);

}  // namespace glyphforge::mlp
