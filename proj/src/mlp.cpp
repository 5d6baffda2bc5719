#include "glyphforge/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glyphforge/errors.hpp"
#include "glyphforge/random.hpp"

namespace glyphforge::mlp {

void MlpConfig::validate() const {
  if (input_size < 1 || hidden_size < 1 || output_size < 1)
    throw ShapeError("layer sizes must be at least 1");
  if (!(learning_rate > 0.0)) throw ShapeError("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ShapeError("momentum must lie in [0, 1)");
}

std::size_t default_hidden_size(Extractor e) noexcept {
  return e == Extractor::kChain200 ? 50 : 45;
}

MinMaxScaler MinMaxScaler::fit(std::span<const std::vector<double>> rows) {
  MinMaxScaler s;
  if (rows.empty()) return s;
  s.lo = rows.front();
  s.hi = rows.front();
  for (const auto& r : rows) {
    if (r.size() != s.lo.size()) throw ShapeError("scaler: ragged rows");
    for (std::size_t i = 0; i < r.size(); ++i) {
      s.lo[i] = std::min(s.lo[i], r[i]);
      s.hi[i] = std::max(s.hi[i], r[i]);
    }
  }
  return s;
}

std::vector<double> MinMaxScaler::apply(std::span<const double> x) const {
  if (empty()) return {x.begin(), x.end()};
  if (x.size() != lo.size()) throw ShapeError("scaler: input has wrong length");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double range = hi[i] - lo[i];
    out[i] = range > 0.0 ? (x[i] - lo[i]) / range : 0.0;
  }
  return out;
}

void MlpModel::validate() const {
  config.validate();
  if (w1.rows != config.hidden_size || w1.cols != config.input_size ||
      w1.data.size() != w1.rows * w1.cols)
    throw ShapeError("w1 does not match config");
  if (w2.rows != config.output_size || w2.cols != config.hidden_size ||
      w2.data.size() != w2.rows * w2.cols)
    throw ShapeError("w2 does not match config");
  if (b1.size() != config.hidden_size || b2.size() != config.output_size)
    throw ShapeError("bias length does not match config");
  if (labels.size() != config.output_size) throw ShapeError("label table length != output size");
  if (!scaler.empty() && (scaler.lo.size() != config.input_size || scaler.hi.size() != config.input_size))
    throw ShapeError("scaler length != input size");
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
  };
  if (!finite(w1.data) || !finite(w2.data) || !finite(b1) || !finite(b2))
    throw ShapeError("non-finite weight");
}

MlpModel init_model(const MlpConfig& config) {
  config.validate();
  MlpModel m;
  m.config = config;
  m.w1 = Matrix(config.hidden_size, config.input_size);
  m.w2 = Matrix(config.output_size, config.hidden_size);
  m.b1.assign(config.hidden_size, 0.0);
  m.b2.assign(config.output_size, 0.0);
  Rng rng(derive_seed(config.seed, 0));
  const double r1 = std::sqrt(6.0 / static_cast<double>(config.input_size + config.hidden_size));
  for (double& w : m.w1.data) w = rng.uniform(-r1, r1);
  const double r2 = std::sqrt(6.0 / static_cast<double>(config.hidden_size + config.output_size));
  for (double& w : m.w2.data) w = rng.uniform(-r2, r2);
  for (std::size_t i = 0; i < config.output_size; ++i) m.labels.push_back(std::to_string(i));
  return m;
}

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

struct Activations {
  std::vector<double> hidden;
  std::vector<double> output;
};

void forward_raw(const MlpModel& m, std::span<const double> x, Activations& a) {
  const auto& c = m.config;
  a.hidden.resize(c.hidden_size);
  a.output.resize(c.output_size);
  for (std::size_t j = 0; j < c.hidden_size; ++j) {
    const auto row = m.w1.row(j);
    a.hidden[j] = sigmoid(std::inner_product(row.begin(), row.end(), x.begin(), m.b1[j]));
  }
  for (std::size_t k = 0; k < c.output_size; ++k) {
    const auto row = m.w2.row(k);
    a.output[k] = sigmoid(std::inner_product(row.begin(), row.end(), a.hidden.begin(), m.b2[k]));
  }
}

void check_input(const MlpModel& m, std::size_t n) {
  if (n != m.config.input_size)
    throw ShapeError("input has length " + std::to_string(n) + ", model expects " +
                     std::to_string(m.config.input_size));
}

// Output and hidden deltas of the squared-error loss; returns nothing else so
// the online trainer can fold the weight update into the same pass.
void deltas(const MlpModel& m, const Activations& a, std::span<const double> target,
            std::vector<double>& d_out, std::vector<double>& d_hid) {
  const auto& c = m.config;
  d_out.resize(c.output_size);
  d_hid.assign(c.hidden_size, 0.0);
  for (std::size_t k = 0; k < c.output_size; ++k) {
    const double o = a.output[k];
    d_out[k] = (o - target[k]) * o * (1.0 - o);
  }
  for (std::size_t k = 0; k < c.output_size; ++k) {
    const auto row = m.w2.row(k);
    for (std::size_t j = 0; j < c.hidden_size; ++j) d_hid[j] += d_out[k] * row[j];
  }
  for (std::size_t j = 0; j < c.hidden_size; ++j) {
    const double h = a.hidden[j];
    d_hid[j] *= h * (1.0 - h);
  }
}

}  // namespace

std::vector<double> forward(const MlpModel& model, std::span<const double> x) {
  check_input(model, x.size());
  const auto scaled = model.scaler.apply(x);
  Activations a;
  forward_raw(model, scaled, a);
  return a.output;
}

std::vector<RankedClass> rank(std::span<const double> scores) {
  std::vector<RankedClass> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = {i, scores[i]};
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedClass& a, const RankedClass& b) { return a.score > b.score; });
  return out;
}

std::vector<RankedClass> predict(const MlpModel& model, std::span<const double> x) {
  return rank(forward(model, x));
}

Gradients loss_gradient(const MlpModel& model, std::span<const double> x,
                        std::span<const double> target) {
  check_input(model, x.size());
  if (target.size() != model.config.output_size) throw ShapeError("target has wrong length");
  const auto& c = model.config;
  Activations a;
  forward_raw(model, x, a);
  std::vector<double> d_out, d_hid;
  deltas(model, a, target, d_out, d_hid);

  Gradients g{Matrix(c.hidden_size, c.input_size), d_hid, Matrix(c.output_size, c.hidden_size),
              d_out};
  for (std::size_t j = 0; j < c.hidden_size; ++j)
    for (std::size_t i = 0; i < c.input_size; ++i) g.w1(j, i) = d_hid[j] * x[i];
  for (std::size_t k = 0; k < c.output_size; ++k)
    for (std::size_t j = 0; j < c.hidden_size; ++j) g.w2(k, j) = d_out[k] * a.hidden[j];
  return g;
}

double sample_loss(const MlpModel& model, std::span<const double> x,
                   std::span<const double> target) {
  check_input(model, x.size());
  Activations a;
  forward_raw(model, x, a);
  double loss = 0.0;
  for (std::size_t k = 0; k < a.output.size(); ++k) {
    const double e = target[k] - a.output[k];
    loss += 0.5 * e * e;
  }
  return loss;
}

TrainingReport train(MlpModel& model, std::span<const LabeledVector> data) {
  if (data.empty()) throw TrainError("training set is empty");
  model.validate();
  const auto& c = model.config;

  std::vector<std::vector<double>> inputs;
  inputs.reserve(data.size());
  for (const auto& s : data) {
    check_input(model, s.x.size());
    if (s.label >= c.output_size)
      throw TrainError("class index " + std::to_string(s.label) + " >= output size");
    inputs.push_back(model.scaler.apply(s.x));
  }

  Matrix dw1(c.hidden_size, c.input_size);
  Matrix dw2(c.output_size, c.hidden_size);
  std::vector<double> db1(c.hidden_size, 0.0);
  std::vector<double> db2(c.output_size, 0.0);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(c.seed, 1));

  Activations a;
  std::vector<double> target(c.output_size, 0.0);
  std::vector<double> d_out, d_hid;
  const double lr = c.learning_rate;
  const double mom = c.momentum;

  TrainingReport report;
  for (std::size_t epoch = 0; epoch < c.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double sq = 0.0;
    for (std::size_t idx : order) {
      const auto& x = inputs[idx];
      std::fill(target.begin(), target.end(), 0.0);
      target[data[idx].label] = 1.0;

      forward_raw(model, x, a);
      for (std::size_t k = 0; k < c.output_size; ++k) {
        const double e = target[k] - a.output[k];
        sq += e * e;
      }
      deltas(model, a, target, d_out, d_hid);

      for (std::size_t k = 0; k < c.output_size; ++k) {
        double* wrow = &model.w2.data[k * c.hidden_size];
        double* drow = &dw2.data[k * c.hidden_size];
        for (std::size_t j = 0; j < c.hidden_size; ++j) {
          drow[j] = -lr * d_out[k] * a.hidden[j] + mom * drow[j];
          wrow[j] += drow[j];
        }
        db2[k] = -lr * d_out[k] + mom * db2[k];
        model.b2[k] += db2[k];
      }
      for (std::size_t j = 0; j < c.hidden_size; ++j) {
        double* wrow = &model.w1.data[j * c.input_size];
        double* drow = &dw1.data[j * c.input_size];
        for (std::size_t i = 0; i < c.input_size; ++i) {
          drow[i] = -lr * d_hid[j] * x[i] + mom * drow[i];
          wrow[i] += drow[i];
        }
        db1[j] = -lr * d_hid[j] + mom * db1[j];
        model.b1[j] += db1[j];
      }
    }
    const double mse = sq / static_cast<double>(data.size() * c.output_size);
    report.epoch_mse.push_back(mse);
    if (!std::isfinite(mse)) throw TrainError("training diverged (non-finite error)");
    if (mse <= c.target_mse) {
      report.converged = true;
      break;
    }
  }
  return report;
}

}  // namespace glyphforge::mlp
