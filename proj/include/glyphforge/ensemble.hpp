#pragma once

#include <span>
#include <string>
#include <vector>

#include "glyphforge/mlp.hpp"

namespace glyphforge::ensemble {

struct FusionWeights {
  double d1 = 0.0;  // success rate of the chain-code classifier
  double d2 = 0.0;  // success rate of the moment classifier
  double w1 = 0.5;
  double w2 = 0.5;
};

/// w_k = d_k / (d1 + d2). Throws DegenerateWeights when d1 + d2 == 0 and
/// ShapeError when a rate is negative or not finite.
FusionWeights compute_weights(double d1, double d2);

/// Weighted-majority scores w1*o1_i + w2*o2_i, ranked descending with ties
/// broken by ascending class index.
std::vector<mlp::RankedClass> fuse(const FusionWeights& w, std::span<const double> o1,
                                   std::span<const double> o2);

struct EnsembleModel {
  mlp::MlpModel model1;  // chain-code member
  mlp::MlpModel model2;  // moment member
  FusionWeights weights;

  const std::vector<std::string>& labels() const { return model1.labels; }
  /// Throws LabelError when the members disagree on the class table.
  void validate() const;
};

/// A holdout sample seen by both members: one feature vector per member.
struct PairedSample {
  std::vector<double> x1;
  std::vector<double> x2;
  std::size_t label = 0;
};

/// Top-1 accuracy of a model on labelled vectors.
double top1_accuracy(const mlp::MlpModel& model, std::span<const mlp::LabeledVector> data);

/// Measures each member's top-1 accuracy on the holdout and turns the two
/// rates into fusion weights.
FusionWeights calibrate(const mlp::MlpModel& model1, const mlp::MlpModel& model2,
                        std::span<const PairedSample> holdout);

std::vector<mlp::RankedClass> predict(const EnsembleModel& model, std::span<const double> x1,
                                      std::span<const double> x2);

}  // namespace glyphforge::ensemble
