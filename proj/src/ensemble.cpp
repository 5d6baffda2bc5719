#include "glyphforge/ensemble.hpp"

#include <cmath>

#include "glyphforge/errors.hpp"

namespace glyphforge::ensemble {

FusionWeights compute_weights(double d1, double d2) {
  if (!(d1 >= 0.0) || !(d2 >= 0.0) || !std::isfinite(d1) || !std::isfinite(d2))
    throw ShapeError("success rates must be finite and non-negative");
  const double total = d1 + d2;
  if (total == 0.0) throw DegenerateWeights("both classifiers have zero success rate");
  return {d1, d2, d1 / total, d2 / total};
}

std::vector<mlp::RankedClass> fuse(const FusionWeights& w, std::span<const double> o1,
                                   std::span<const double> o2) {
  if (o1.size() != o2.size())
    throw ShapeError("fuse: confidence vectors differ in length (" + std::to_string(o1.size()) +
                     " vs " + std::to_string(o2.size()) + ")");
  std::vector<double> scores(o1.size());
  for (std::size_t i = 0; i < o1.size(); ++i) scores[i] = w.w1 * o1[i] + w.w2 * o2[i];
  return mlp::rank(scores);
}

void EnsembleModel::validate() const {
  model1.validate();
  model2.validate();
  if (model1.labels != model2.labels || model1.config.output_size != model2.config.output_size)
    throw LabelError("ensemble members have different class tables");
}

double top1_accuracy(const mlp::MlpModel& model, std::span<const mlp::LabeledVector> data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& s : data)
    if (mlp::predict(model, s.x).front().index == s.label) ++hits;
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

FusionWeights calibrate(const mlp::MlpModel& model1, const mlp::MlpModel& model2,
                        std::span<const PairedSample> holdout) {
  if (holdout.empty()) throw DegenerateWeights("calibration holdout is empty");
  std::size_t hits1 = 0, hits2 = 0;
  for (const auto& s : holdout) {
    if (mlp::predict(model1, s.x1).front().index == s.label) ++hits1;
    if (mlp::predict(model2, s.x2).front().index == s.label) ++hits2;
  }
  const double n = static_cast<double>(holdout.size());
  return compute_weights(static_cast<double>(hits1) / n, static_cast<double>(hits2) / n);
}

std::vector<mlp::RankedClass> predict(const EnsembleModel& model, std::span<const double> x1,
                                      std::span<const double> x2) {
  const auto o1 = mlp::forward(model.model1, x1);
  const auto o2 = mlp::forward(model.model2, x2);
  return fuse(model.weights, o1, o2);
}

}  // namespace glyphforge::ensemble
