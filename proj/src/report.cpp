#include <cstdio>
#include <sstream>

#include "glyphforge/evaluation.hpp"
#include "json.hpp"

namespace glyphforge::eval {

namespace {

using Json = nlohmann::ordered_json;

Json to_json(const EvalReport& r) {
  Json j;
  j["n_samples"] = r.n_samples;
  Json top = Json::object();
  for (const auto& [k, acc] : r.top_k_accuracy) top["top" + std::to_string(k)] = acc;
  j["top_k_accuracy"] = top;
  j["labels"] = r.labels;
  j["confusion"] = r.confusion;
  Json pairs = Json::array();
  for (const auto& p : r.confused_pairs)
    pairs.push_back({{"true", p.truth}, {"predicted", p.predicted}, {"count", p.count}});
  j["confused_pairs"] = pairs;
  return j;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%6.2f%%", 100.0 * v);
  return buf;
}

}  // namespace

std::string report_json(const EvalReport& r) { return to_json(r).dump(2) + "\n"; }

std::string protocol_json(const ProtocolReport& r) {
  Json j;
  j["mode"] = r.plan.mode == SplitMode::kFixed ? "fixed" : "kfold";
  if (r.plan.mode == SplitMode::kFixed)
    j["train_fraction"] = r.plan.train_fraction;
  else
    j["folds"] = r.plan.folds;
  j["seed"] = r.plan.seed;
  j["stratified"] = r.plan.stratified;
  j["labels"] = r.labels;
  Json folds = Json::array();
  for (const auto& f : r.folds) {
    Json jf;
    jf["fold"] = f.fold;
    jf["n_train"] = f.n_train;
    jf["n_calib"] = f.n_calib;
    jf["n_test"] = f.n_test;
    jf["final_mse"] = f.final_mse;
    if (f.weights)
      jf["fusion"] = {{"d1", f.weights->d1}, {"d2", f.weights->d2}, {"w1", f.weights->w1},
                      {"w2", f.weights->w2}};
    Json reps = Json::object();
    for (const auto& [name, rep] : f.reports) reps[name] = to_json(rep);
    jf["reports"] = reps;
    folds.push_back(jf);
  }
  j["fold_reports"] = folds;
  Json agg = Json::object();
  for (const auto& [name, per_k] : r.aggregate) {
    Json a = Json::object();
    for (const auto& [k, ms] : per_k)
      a["top" + std::to_string(k)] = {{"mean", ms.mean}, {"std", ms.stddev}};
    agg[name] = a;
  }
  j["aggregate"] = agg;
  return j.dump(2) + "\n";
}

std::string report_text(const EvalReport& r, std::size_t max_pairs) {
  std::ostringstream out;
  out << "samples: " << r.n_samples << '\n';
  for (const auto& [k, acc] : r.top_k_accuracy) out << "top-" << k << " accuracy: " << percent(acc) << '\n';
  if (!r.confused_pairs.empty()) {
    out << "most confused (true -> predicted: count):\n";
    for (std::size_t i = 0; i < r.confused_pairs.size() && i < max_pairs; ++i) {
      const auto& p = r.confused_pairs[i];
      out << "  " << p.truth << " -> " << p.predicted << ": " << p.count << '\n';
    }
  }
  return out.str();
}

std::string protocol_text(const ProtocolReport& r) {
  std::ostringstream out;
  for (const auto& f : r.folds) {
    out << (r.plan.mode == SplitMode::kFixed ? "split" : "fold " + std::to_string(f.fold))
        << ": train " << f.n_train << ", calib " << f.n_calib << ", test " << f.n_test << '\n';
    if (f.weights) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "  fusion: d1=%.4f d2=%.4f w1=%.4f w2=%.4f\n", f.weights->d1,
                    f.weights->d2, f.weights->w1, f.weights->w2);
      out << buf;
    }
    for (const auto& [name, rep] : f.reports) {
      out << "  " << name << ':';
      for (const auto& [k, acc] : rep.top_k_accuracy) out << "  top-" << k << ' ' << percent(acc);
      out << '\n';
    }
  }
  out << "aggregate (mean +- std):\n";
  for (const auto& [name, per_k] : r.aggregate) {
    out << "  " << name << ':';
    for (const auto& [k, ms] : per_k) out << "  top-" << k << ' ' << percent(ms.mean) << " +- " << percent(ms.stddev);
    out << '\n';
  }
  return out.str();
}

std::string confusion_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "true\\predicted";
  for (const auto& l : r.labels) out << ',' << l;
  out << '\n';
  for (std::size_t a = 0; a < r.labels.size(); ++a) {
    out << r.labels[a];
    for (std::size_t b = 0; b < r.labels.size(); ++b) out << ',' << r.confusion[a][b];
    out << '\n';
  }
  return out.str();
}

}  // namespace glyphforge::eval
