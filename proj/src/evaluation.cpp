#include "glyphforge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glyphforge/errors.hpp"
#include "glyphforge/random.hpp"

namespace glyphforge::eval {

void SplitPlan::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw SplitError("train fraction must lie strictly between 0 and 1");
  if (folds < 2) throw SplitError("k-fold needs at least 2 folds");
}

namespace {

// Sample indices grouped by class, classes in sorted label order.
std::vector<std::pair<std::string, std::vector<std::size_t>>> by_class(
    std::span<const std::string> labels) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  return {groups.begin(), groups.end()};
}

}  // namespace

Partition split_fixed(std::span<const std::string> labels, const SplitPlan& plan) {
  plan.validate();
  Rng rng(derive_seed(plan.seed, 101));
  const std::size_t n = labels.size();
  const auto total_train =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * plan.train_fraction));

  Partition p;
  if (!plan.stratified) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    p.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(total_train));
    p.test.assign(order.begin() + static_cast<std::ptrdiff_t>(total_train), order.end());
  } else {
    auto groups = by_class(labels);
    std::vector<std::size_t> quota(groups.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < groups.size(); ++c) {
      const double exact = static_cast<double>(groups[c].second.size()) * plan.train_fraction;
      quota[c] = static_cast<std::size_t>(std::floor(exact));
      assigned += quota[c];
      remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < total_train && i < remainders.size(); ++i, ++assigned)
      ++quota[remainders[i].second];

    for (std::size_t c = 0; c < groups.size(); ++c) {
      auto& idx = groups[c].second;
      rng.shuffle(std::span<std::size_t>(idx));
      p.train.insert(p.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]));
      p.test.insert(p.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]), idx.end());
    }
  }
  std::sort(p.train.begin(), p.train.end());
  std::sort(p.test.begin(), p.test.end());
  return p;
}

std::vector<std::vector<std::size_t>> split_folds(std::span<const std::string> labels,
                                                  const SplitPlan& plan) {
  plan.validate();
  Rng rng(derive_seed(plan.seed, 202));
  std::vector<std::vector<std::size_t>> folds(plan.folds);
  if (plan.stratified) {
    auto groups = by_class(labels);
    for (const auto& [label, idx] : groups)
      if (idx.size() < plan.folds)
        throw SplitError("class '" + label + "' has " + std::to_string(idx.size()) +
                         " samples, fewer than " + std::to_string(plan.folds) + " folds");
    std::size_t deal = 0;
    for (auto& [label, idx] : groups) {
      rng.shuffle(std::span<std::size_t>(idx));
      for (std::size_t i : idx) folds[deal++ % plan.folds].push_back(i);
    }
  } else {
    if (labels.size() < plan.folds) throw SplitError("fewer samples than folds");
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i = 0; i < order.size(); ++i) folds[i % plan.folds].push_back(order[i]);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::size_t label_index(std::span<const std::string> class_table, const std::string& label) {
  const auto it = std::find(class_table.begin(), class_table.end(), label);
  if (it == class_table.end()) throw LabelError("label '" + label + "' is not in the model's class table");
  return static_cast<std::size_t>(it - class_table.begin());
}

std::vector<std::size_t> indices_of(const std::vector<mlp::RankedClass>& ranked) {
  std::vector<std::size_t> out;
  out.reserve(ranked.size());
  for (const auto& r : ranked) out.push_back(r.index);
  return out;
}

EvalReport evaluate(const Predictor& predict, std::span<const std::string> truth,
                    std::span<const std::string> class_table) {
  if (truth.empty()) throw ShapeError("evaluate: empty test set");
  const std::size_t m = class_table.size();
  EvalReport r;
  r.n_samples = truth.size();
  r.labels.assign(class_table.begin(), class_table.end());
  r.confusion.assign(m, std::vector<std::size_t>(m, 0));
  std::map<int, std::size_t> hits;
  for (int k : kTopK) hits[k] = 0;

  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::size_t t = label_index(class_table, truth[i]);
    const auto ranking = predict(i);
    if (ranking.empty() || ranking.front() >= m)
      throw ShapeError("predictor returned an invalid ranking");
    ++r.confusion[t][ranking.front()];
    const auto pos = std::find(ranking.begin(), ranking.end(), t);
    const auto rank_of = static_cast<std::size_t>(pos - ranking.begin());
    for (int k : kTopK)
      if (pos != ranking.end() && rank_of < static_cast<std::size_t>(k)) ++hits[k];
  }
  for (int k : kTopK)
    r.top_k_accuracy[k] = static_cast<double>(hits[k]) / static_cast<double>(r.n_samples);

  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (a != b && r.confusion[a][b] > 0)
        r.confused_pairs.push_back({class_table[a], class_table[b], r.confusion[a][b]});
  std::stable_sort(r.confused_pairs.begin(), r.confused_pairs.end(),
                   [](const ConfusedPair& x, const ConfusedPair& y) { return x.count > y.count; });
  return r;
}

TrainSpec::TrainSpec() {
  chain_config.hidden_size = mlp::default_hidden_size(Extractor::kChain200);
  moment_config.input_size = extractor_dim(Extractor::kMoment63);
  moment_config.hidden_size = mlp::default_hidden_size(Extractor::kMoment63);
}

void check_views(const std::vector<data::FeatureTable>& views) {
  if (views.empty() || views.size() > 2) throw ShapeError("expected one or two feature views");
  for (const auto& v : views) v.validate();
  if (views.size() == 2) {
    if (views[0].extractor_id != "chain200" || views[1].extractor_id != "moment63")
      throw FormatError("ensemble views must be chain200 then moment63");
    if (views[0].rows.size() != views[1].rows.size())
      throw FormatError("feature views have different row counts");
    for (std::size_t i = 0; i < views[0].rows.size(); ++i)
      if (views[0].rows[i].id != views[1].rows[i].id ||
          views[0].rows[i].label != views[1].rows[i].label)
        throw FormatError("feature views are not row-aligned at '" + views[0].rows[i].id + "'");
  }
  if (views[0].rows.empty()) throw TrainError("feature table has no rows");
}

namespace {

std::vector<std::string> labels_of(const data::FeatureTable& t) {
  std::vector<std::string> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) out.push_back(r.label);
  return out;
}

std::vector<mlp::LabeledVector> vectors_of(const data::FeatureTable& t,
                                           std::span<const std::size_t> rows,
                                           std::span<const std::string> class_table) {
  std::vector<mlp::LabeledVector> out;
  out.reserve(rows.size());
  for (std::size_t i : rows)
    out.push_back({t.rows[i].values, label_index(class_table, t.rows[i].label)});
  return out;
}

const mlp::MlpConfig& config_for(const TrainSpec& spec, const std::string& extractor) {
  return extractor == "moment63" ? spec.moment_config : spec.chain_config;
}

}  // namespace

FittedModels fit_models(const std::vector<data::FeatureTable>& views,
                        std::span<const std::string> class_table,
                        std::span<const std::size_t> indices, const TrainSpec& spec,
                        std::uint64_t stream) {
  check_views(views);
  std::vector<std::size_t> all;
  if (indices.empty()) {
    all.resize(views[0].rows.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    indices = all;
  }

  FittedModels out;
  std::vector<std::size_t> fit(indices.begin(), indices.end());
  std::vector<std::size_t> calib;
  const bool fuse = views.size() == 2;
  if (fuse && spec.calib_fraction > 0.0) {
    std::vector<std::string> sub_labels;
    for (std::size_t i : indices) sub_labels.push_back(views[0].rows[i].label);
    SplitPlan plan;
    plan.mode = SplitMode::kFixed;
    plan.train_fraction = 1.0 - spec.calib_fraction;
    plan.seed = derive_seed(spec.seed, 1000 + stream);
    const auto part = split_fixed(sub_labels, plan);
    fit.clear();
    for (std::size_t j : part.train) fit.push_back(indices[j]);
    for (std::size_t j : part.test) calib.push_back(indices[j]);
  }
  out.n_fit = fit.size();
  out.n_calib = calib.size();

  for (std::size_t v = 0; v < views.size(); ++v) {
    const auto& view = views[v];
    mlp::MlpConfig cfg = config_for(spec, view.extractor_id);
    cfg.input_size = view.dim;
    cfg.output_size = class_table.size();
    cfg.seed = derive_seed(spec.seed, stream * 16 + v);
    auto model = mlp::init_model(cfg);
    model.labels.assign(class_table.begin(), class_table.end());
    model.extractor = view.extractor_id;

    const auto train_set = vectors_of(view, fit, class_table);
    std::vector<std::vector<double>> xs;
    xs.reserve(train_set.size());
    for (const auto& s : train_set) xs.push_back(s.x);
    model.scaler = mlp::MinMaxScaler::fit(xs);

    out.reports.push_back(mlp::train(model, train_set));
    out.members.push_back(std::move(model));
  }

  if (fuse) {
    // Without a calibration share the rates come from the training rows.
    const auto& rows = calib.empty() ? fit : calib;
    std::vector<ensemble::PairedSample> holdout;
    for (std::size_t i : rows)
      holdout.push_back({views[0].rows[i].values, views[1].rows[i].values,
                         label_index(class_table, views[0].rows[i].label)});
    out.weights = ensemble::calibrate(out.members[0], out.members[1], holdout);
    out.members[0].fusion = mlp::FusionSlot{out.weights->d1, out.weights->w1};
    out.members[1].fusion = mlp::FusionSlot{out.weights->d2, out.weights->w2};
  }
  return out;
}

namespace {

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd ms;
  if (xs.empty()) return ms;
  ms.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - ms.mean) * (x - ms.mean);
    ms.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return ms;
}

FoldResult run_fold(const std::vector<data::FeatureTable>& views,
                    std::span<const std::string> class_table, std::span<const std::size_t> train,
                    std::span<const std::size_t> test, const TrainSpec& spec, std::size_t fold) {
  FoldResult fr;
  fr.fold = fold;
  fr.n_test = test.size();
  fr.train_rows.assign(train.begin(), train.end());
  fr.test_rows.assign(test.begin(), test.end());
  auto fitted = fit_models(views, class_table, train, spec, fold + 1);
  fr.n_train = fitted.n_fit;
  fr.n_calib = fitted.n_calib;
  fr.weights = fitted.weights;
  for (const auto& rep : fitted.reports) fr.final_mse.push_back(rep.final_mse());

  std::vector<std::string> truth;
  for (std::size_t i : test) truth.push_back(views[0].rows[i].label);

  std::vector<std::vector<std::vector<double>>> conf(views.size());
  for (std::size_t v = 0; v < views.size(); ++v) {
    for (std::size_t i : test) conf[v].push_back(mlp::forward(fitted.members[v], views[v].rows[i].values));
    fr.reports[views[v].extractor_id] = evaluate(
        [&](std::size_t j) { return indices_of(mlp::rank(conf[v][j])); }, truth, class_table);
  }
  if (fitted.weights) {
    const auto w = *fitted.weights;
    fr.reports["fused"] = evaluate(
        [&](std::size_t j) { return indices_of(ensemble::fuse(w, conf[0][j], conf[1][j])); },
        truth, class_table);
  }
  return fr;
}

}  // namespace

ProtocolReport run_protocol(const std::vector<data::FeatureTable>& views, const SplitPlan& plan,
                            const TrainSpec& spec) {
  check_views(views);
  plan.validate();
  const auto labels = labels_of(views[0]);
  ProtocolReport report;
  report.plan = plan;
  report.labels = data::class_table(labels);

  if (plan.mode == SplitMode::kFixed) {
    const auto part = split_fixed(labels, plan);
    if (part.test.empty() || part.train.empty()) throw SplitError("split leaves an empty partition");
    report.folds.push_back(run_fold(views, report.labels, part.train, part.test, spec, 0));
  } else {
    const auto folds = split_folds(labels, plan);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::vector<std::size_t> train;
      for (std::size_t g = 0; g < folds.size(); ++g)
        if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
      std::sort(train.begin(), train.end());
      report.folds.push_back(run_fold(views, report.labels, train, folds[f], spec, f));
    }
  }

  for (const auto& [name, first] : report.folds.front().reports) {
    for (int k : kTopK) {
      std::vector<double> xs;
      for (const auto& f : report.folds) xs.push_back(f.reports.at(name).top_k_accuracy.at(k));
      report.aggregate[name][k] = mean_std(xs);
    }
  }
  return report;
}

ProtocolReport cross_validate(const std::vector<data::FeatureTable>& views,
                              const SplitPlan& plan, const TrainSpec& spec) {
  if (plan.mode != SplitMode::kKFold) throw SplitError("cross-validation requires k-fold mode");
  return run_protocol(views, plan, spec);
}

}  // namespace glyphforge::eval
