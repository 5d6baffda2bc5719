#include "glyphforge/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "glyphforge/dataset_io.hpp"
#include "glyphforge/ensemble.hpp"
#include "glyphforge/errors.hpp"
#include "glyphforge/evaluation.hpp"
#include "glyphforge/features.hpp"
#include "glyphforge/model_io.hpp"

namespace fs = std::filesystem;

namespace glyphforge::cli {

namespace {

struct Common {
  std::uint64_t seed = 0;
  bool verbose = false;
};

struct InputArgs {
  std::string corpus;
  std::vector<std::string> features;
  bool strict = false;
};

struct ExtractArgs {
  InputArgs in;
  std::string extractor;
  std::string out;
  std::string dump_stages;
  ExtractOptions opts;
};

struct HyperArgs {
  std::optional<std::size_t> hidden, hidden_chain, hidden_moment;
  double lr = 0.8;
  double momentum = 0.7;
  std::size_t epochs = 1000;
  double target_mse = 1e-3;
  double calib_fraction = 0.2;
};

struct TrainArgs {
  InputArgs in;
  HyperArgs hyper;
  std::string extractor = "chain200";
  std::string out;
  bool ensemble = false;
  ExtractOptions opts;
};

struct EvalArgs {
  InputArgs in;
  std::string model;
  std::string json;
  std::string confusion_csv;
};

struct CrossvalArgs {
  InputArgs in;
  HyperArgs hyper;
  std::string extractor = "both";
  std::string mode = "kfold";
  std::size_t folds = 3;
  double train_fraction = 0.65;
  bool no_stratify = false;
  std::string json;
  ExtractOptions opts;
};

struct PredictArgs {
  std::string model;
  std::string image;
  std::string dir;
  std::size_t k = 5;
};

struct SynthArgs {
  std::string out;
  int classes = 20;
  int per_class = 75;
};

void log(const Common& c, const std::string& msg) {
  if (c.verbose) std::cerr << msg << '\n';
}

void add_input(CLI::App* sub, InputArgs& in, bool features) {
  sub->add_option("--corpus", in.corpus, "Corpus root: <root>/<class>/<sample>.pgm");
  if (features)
    sub->add_option("--features", in.features, "Feature CSV (repeat for chain200 + moment63)");
  sub->add_flag("--strict", in.strict, "Fail on the first unreadable image instead of skipping it");
}

void add_extract_opts(CLI::App* sub, ExtractOptions& opts) {
  sub->add_flag("--normalize", opts.normalize, "chain200: divide histograms by total move count");
  sub->add_flag("--log-moments", opts.log_moments, "moment63: signed log scaling of invariants");
}

void add_hyper(CLI::App* sub, HyperArgs& h) {
  sub->add_option("--hidden", h.hidden, "Hidden units for every trained MLP")->check(CLI::PositiveNumber);
  sub->add_option("--hidden-chain", h.hidden_chain, "Hidden units of the chain200 MLP (default 50)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--hidden-moment", h.hidden_moment, "Hidden units of the moment63 MLP (default 45)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--lr", h.lr, "Learning rate")->capture_default_str();
  sub->add_option("--momentum", h.momentum, "Momentum term")->capture_default_str();
  sub->add_option("--epochs", h.epochs, "Maximum training epochs")->capture_default_str();
  sub->add_option("--target-mse", h.target_mse, "Stop once an epoch's MSE reaches this")
      ->capture_default_str();
  sub->add_option("--calib-fraction", h.calib_fraction,
                  "Share of training data held out to measure fusion weights")
      ->check(CLI::Range(0.0, 0.9))
      ->capture_default_str();
}

eval::TrainSpec make_spec(const HyperArgs& h, std::uint64_t seed) {
  eval::TrainSpec spec;
  for (auto* c : {&spec.chain_config, &spec.moment_config}) {
    c->learning_rate = h.lr;
    c->momentum = h.momentum;
    c->max_epochs = h.epochs;
    c->target_mse = h.target_mse;
    if (h.hidden) c->hidden_size = *h.hidden;
  }
  if (h.hidden_chain) spec.chain_config.hidden_size = *h.hidden_chain;
  if (h.hidden_moment) spec.moment_config.hidden_size = *h.hidden_moment;
  spec.chain_config.validate();
  spec.moment_config.validate();
  spec.calib_fraction = h.calib_fraction;
  spec.seed = seed;
  return spec;
}

data::Corpus load(const Common& c, const InputArgs& in) {
  auto corpus = data::load_corpus(in.corpus, in.strict);
  for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << '\n';
  log(c, "loaded " + std::to_string(corpus.samples.size()) + " samples from " + in.corpus);
  return corpus;
}

void dump_stage(const fs::path& dir, const std::string& id, const char* stage, const BinaryImage& img) {
  auto path = dir / (id + "." + stage + ".pgm");
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  write_pgm(path, to_gray(img));
}

data::FeatureTable extract_table(const Common& c, const data::Corpus& corpus, Extractor e,
                                 const ExtractOptions& opts, bool strict,
                                 const std::string& dump_dir = {}) {
  data::FeatureTable t{std::string(extractor_name(e)), extractor_dim(e), {}};
  for (const auto& s : corpus.samples) {
    ExtractStages stages;
    try {
      auto v = extract_features(s.image, e, opts, dump_dir.empty() ? nullptr : &stages);
      t.rows.push_back({s.id, s.label, std::move(v)});
    } catch (const EmptyGlyph& err) {
      if (strict) throw EmptyGlyph(s.id + ": " + err.what());
      std::cerr << "warning: skipped " << s.id << ": " << err.what() << '\n';
      continue;
    }
    if (!dump_dir.empty()) {
      dump_stage(dump_dir, s.id, "binary", stages.binary);
      dump_stage(dump_dir, s.id, "normalized", stages.normalized);
      dump_stage(dump_dir, s.id, e == Extractor::kChain200 ? "contour" : "skeleton", stages.shaped);
    }
  }
  log(c, "extracted " + std::to_string(t.rows.size()) + " " + t.extractor_id + " vectors");
  return t;
}

// Loads feature views for training: from feature files (sorted into
// chain200, moment63 order) or by extracting from a corpus. A sample
// skipped by one extractor is dropped from the other view too.
std::vector<data::FeatureTable> load_views(const Common& c, const InputArgs& in,
                                           const std::vector<Extractor>& wanted,
                                           const ExtractOptions& opts) {
  if (in.corpus.empty() == in.features.empty())
    throw CLI::ValidationError("input", "give exactly one of --corpus or --features");
  std::vector<data::FeatureTable> views;
  if (!in.features.empty()) {
    if (in.features.size() > 2) throw CLI::ValidationError("--features", "at most two files");
    for (const auto& f : in.features) views.push_back(data::load_features(f));
    std::sort(views.begin(), views.end(),
              [](const auto& a, const auto& b) { return a.extractor_id < b.extractor_id; });
    if (views.size() == 2) views[1] = data::align_to(views[0], views[1]);
  } else {
    const auto corpus = load(c, in);
    for (auto e : wanted) views.push_back(extract_table(c, corpus, e, opts, in.strict));
    if (views.size() == 2 && views[0].rows.size() != views[1].rows.size()) {
      std::set<std::string> keep;
      for (const auto& r : views[1].rows) keep.insert(r.id);
      std::erase_if(views[0].rows, [&](const auto& r) { return !keep.count(r.id); });
      views[1] = data::align_to(views[0], views[1]);
    }
  }
  return views;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("write failed: " + path);
}

int cmd_extract(const Common& c, const ExtractArgs& a) {
  const auto e = parse_extractor(a.extractor);
  const auto corpus = load(c, a.in);
  const auto table = extract_table(c, corpus, e, a.opts, a.in.strict, a.dump_stages);
  data::save_features(a.out, table);
  std::cout << "wrote " << table.rows.size() << " x " << table.dim << " " << table.extractor_id
            << " features to " << a.out << '\n';
  return 0;
}

void print_training(const mlp::MlpModel& m, const mlp::TrainingReport& r) {
  std::cout << m.extractor << ": hidden " << m.config.hidden_size << ", epochs "
            << r.epoch_mse.size() << ", final MSE " << model_io::format_real(r.final_mse())
            << (r.converged ? " (target reached)" : "") << '\n';
}

int cmd_train(const Common& c, const TrainArgs& a) {
  std::vector<Extractor> wanted;
  if (a.ensemble)
    wanted = {Extractor::kChain200, Extractor::kMoment63};
  else
    wanted = {parse_extractor(a.extractor)};
  auto views = load_views(c, a.in, wanted, a.opts);
  if (a.ensemble && views.size() != 2)
    throw CLI::ValidationError("--ensemble", "needs chain200 and moment63 features");
  if (!a.ensemble && views.size() != 1)
    throw CLI::ValidationError("--features", "train one model from one feature file, or pass --ensemble");

  const auto spec = make_spec(a.hyper, c.seed);
  std::vector<std::string> labels;
  for (const auto& r : views[0].rows) labels.push_back(r.label);
  const auto table = data::class_table(labels);
  auto fitted = eval::fit_models(views, table, {}, spec);
  for (auto& m : fitted.members) {
    m.extract_options = a.opts;
  }
  for (std::size_t i = 0; i < fitted.members.size(); ++i) print_training(fitted.members[i], fitted.reports[i]);

  const fs::path out(a.out);
  if (!a.ensemble) {
    model_io::save_model(out, fitted.members[0]);
    std::cout << "wrote model " << out.string() << '\n';
    return 0;
  }
  const auto stem = out.stem().string();
  const std::string m1 = stem + ".chain200.model";
  const std::string m2 = stem + ".moment63.model";
  model_io::save_model(out.parent_path() / m1, fitted.members[0]);
  model_io::save_model(out.parent_path() / m2, fitted.members[1]);
  ensemble::EnsembleModel em{fitted.members[0], fitted.members[1], *fitted.weights};
  model_io::save_ensemble(out, em, m1, m2);
  const auto& w = *fitted.weights;
  std::cout << "calibration (" << fitted.n_calib << " samples): chain200 accuracy "
            << model_io::format_real(w.d1) << ", moment63 accuracy " << model_io::format_real(w.d2)
            << "\nfusion weights: w1 " << model_io::format_real(w.w1) << ", w2 "
            << model_io::format_real(w.w2) << "\nwrote ensemble " << out.string() << '\n';
  return 0;
}

struct LoadedModel {
  std::optional<mlp::MlpModel> single;
  std::optional<ensemble::EnsembleModel> ensemble;

  const std::vector<std::string>& labels() const {
    return single ? single->labels : ensemble->labels();
  }
};

LoadedModel load_any_model(const std::string& path) {
  const auto kind = model_io::sniff_format(path);
  LoadedModel m;
  if (kind == "glyphforge-mlp")
    m.single = model_io::load_model(path);
  else if (kind == "glyphforge-ensemble")
    m.ensemble = model_io::load_ensemble(path);
  else
    throw FormatError(path + ": not a glyphforge model or ensemble file");
  return m;
}

ExtractOptions options_of(const mlp::MlpModel& m) { return m.extract_options; }

void check_labels(const std::vector<std::string>& model_labels, const data::FeatureTable& t) {
  for (const auto& r : t.rows) eval::label_index(model_labels, r.label);
}

int cmd_eval(const Common& c, const EvalArgs& a) {
  const auto model = load_any_model(a.model);
  std::vector<data::FeatureTable> views;
  if (model.single) {
    const auto e = parse_extractor(model.single->extractor.empty() ? "chain200" : model.single->extractor);
    views = load_views(c, a.in, {e}, options_of(*model.single));
    if (views.size() != 1 || views[0].extractor_id != model.single->extractor)
      throw FormatError("feature file does not match the model's extractor " + model.single->extractor);
  } else {
    if (model.ensemble->model1.extract_options != model.ensemble->model2.extract_options &&
        !a.in.corpus.empty()) {
      // Each member re-extracts with its own options.
      views.push_back(load_views(c, a.in, {Extractor::kChain200}, options_of(model.ensemble->model1))[0]);
      views.push_back(load_views(c, a.in, {Extractor::kMoment63}, options_of(model.ensemble->model2))[0]);
      views[1] = data::align_to(views[0], views[1]);
    } else {
      views = load_views(c, a.in, {Extractor::kChain200, Extractor::kMoment63},
                         options_of(model.ensemble->model1));
    }
    if (views.size() != 2) throw FormatError("an ensemble needs chain200 and moment63 features");
  }
  for (const auto& v : views) check_labels(model.labels(), v);

  std::vector<std::string> truth;
  for (const auto& r : views[0].rows) truth.push_back(r.label);
  eval::Predictor predictor;
  if (model.single) {
    predictor = [&](std::size_t i) {
      return eval::indices_of(mlp::predict(*model.single, views[0].rows[i].values));
    };
  } else {
    predictor = [&](std::size_t i) {
      return eval::indices_of(
          ensemble::predict(*model.ensemble, views[0].rows[i].values, views[1].rows[i].values));
    };
  }
  const auto report = eval::evaluate(predictor, truth, model.labels());
  std::cout << eval::report_text(report);
  if (!a.json.empty()) write_text(a.json, eval::report_json(report));
  if (!a.confusion_csv.empty()) write_text(a.confusion_csv, eval::confusion_csv(report));
  return 0;
}

int cmd_crossval(const Common& c, const CrossvalArgs& a) {
  std::vector<Extractor> wanted;
  if (a.extractor == "both")
    wanted = {Extractor::kChain200, Extractor::kMoment63};
  else
    wanted = {parse_extractor(a.extractor)};
  const auto views = load_views(c, a.in, wanted, a.opts);

  eval::SplitPlan plan;
  plan.mode = a.mode == "fixed" ? eval::SplitMode::kFixed : eval::SplitMode::kKFold;
  plan.folds = a.folds;
  plan.train_fraction = a.train_fraction;
  plan.seed = c.seed;
  plan.stratified = !a.no_stratify;
  const auto spec = make_spec(a.hyper, c.seed);
  const auto report = plan.mode == eval::SplitMode::kKFold ? eval::cross_validate(views, plan, spec)
                                                           : eval::run_protocol(views, plan, spec);
  std::cout << eval::protocol_text(report);
  if (!a.json.empty()) write_text(a.json, eval::protocol_json(report));
  return 0;
}

int cmd_predict(const Common&, const PredictArgs& a) {
  if (a.image.empty() == a.dir.empty())
    throw CLI::ValidationError("input", "give exactly one of --image or --dir");
  const auto model = load_any_model(a.model);

  std::vector<fs::path> images;
  if (!a.image.empty()) {
    images.push_back(a.image);
  } else {
    if (!fs::is_directory(a.dir)) throw IoError("not a directory: " + a.dir);
    for (const auto& entry : fs::recursive_directory_iterator(a.dir))
      if (entry.is_regular_file() && entry.path().extension() == ".pgm") images.push_back(entry.path());
    std::sort(images.begin(), images.end());
  }

  const auto& labels = model.labels();
  for (const auto& path : images) {
    const auto img = read_pgm(path);
    std::vector<mlp::RankedClass> ranked;
    if (model.single) {
      const auto e = parse_extractor(model.single->extractor);
      ranked = mlp::predict(*model.single, extract_features(img, e, model.single->extract_options));
    } else {
      const auto& em = *model.ensemble;
      ranked = ensemble::predict(
          em, extract_features(img, Extractor::kChain200, em.model1.extract_options),
          extract_features(img, Extractor::kMoment63, em.model2.extract_options));
    }
    std::cout << path.string();
    for (std::size_t i = 0; i < ranked.size() && i < a.k; ++i)
      std::cout << ' ' << labels[ranked[i].index] << ':' << model_io::format_real(ranked[i].score);
    std::cout << '\n';
  }
  return 0;
}

int cmd_synth(const Common& c, const SynthArgs& a) {
  const auto samples = data::synth_corpus({a.classes, a.per_class, c.seed});
  data::write_corpus(a.out, samples);
  std::cout << "wrote " << samples.size() << " samples in " << a.classes << " classes to " << a.out << '\n';
  return 0;
}

std::uint64_t env_seed() {
  const char* s = std::getenv("GLYPHFORGE_SEED");
  if (!s || !*s) return 0;
  char* end = nullptr;
  const auto v = std::strtoull(s, &end, 10);
  if (*end != '\0') throw CLI::ValidationError("GLYPHFORGE_SEED", "must be an unsigned integer");
  return v;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"glyphforge: handwritten glyph recognition with chain-code and moment features"};
  app.require_subcommand(1);
  app.allow_extras(false);

  Common common;
  try {
    common.seed = env_seed();
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "Random seed (default: $GLYPHFORGE_SEED or 0)")
        ->capture_default_str();
    sub->add_flag("-v,--verbose", common.verbose, "Progress messages on stderr");
  };

  ExtractArgs ex;
  auto* s_extract = app.add_subcommand("extract", "Extract a feature table from a corpus");
  add_input(s_extract, ex.in, false);
  s_extract->get_option("--corpus")->required();
  s_extract->add_option("--extractor", ex.extractor, "chain200 or moment63")
      ->required()
      ->check(CLI::IsMember({"chain200", "moment63"}));
  s_extract->add_option("--out", ex.out, "Output feature CSV")->required();
  s_extract->add_option("--dump-stages", ex.dump_stages, "Write intermediate images (PGM) under DIR");
  add_extract_opts(s_extract, ex.opts);
  add_common(s_extract);

  TrainArgs tr;
  auto* s_train = app.add_subcommand("train", "Train an MLP, or both MLPs and fusion weights");
  add_input(s_train, tr.in, true);
  add_hyper(s_train, tr.hyper);
  s_train->add_option("--extractor", tr.extractor, "Extractor when training one model from --corpus")
      ->check(CLI::IsMember({"chain200", "moment63"}))
      ->capture_default_str();
  s_train->add_flag("--ensemble", tr.ensemble, "Train both members and calibrate fusion weights");
  s_train->add_option("--out", tr.out, "Model (or ensemble) output file")->required();
  add_extract_opts(s_train, tr.opts);
  add_common(s_train);

  EvalArgs ev;
  auto* s_eval = app.add_subcommand("eval", "Evaluate a model or ensemble on labelled data");
  add_input(s_eval, ev.in, true);
  s_eval->add_option("--model", ev.model, "Model or ensemble file")->required();
  s_eval->add_option("--json", ev.json, "Write the structured report here");
  s_eval->add_option("--confusion-csv", ev.confusion_csv, "Write the confusion matrix here");
  add_common(s_eval);

  CrossvalArgs cv;
  auto* s_cv = app.add_subcommand("crossval", "Cross-validate (k-fold) or run a fixed train/test split");
  add_input(s_cv, cv.in, true);
  add_hyper(s_cv, cv.hyper);
  s_cv->add_option("--extractor", cv.extractor, "chain200, moment63 or both (with --corpus)")
      ->check(CLI::IsMember({"chain200", "moment63", "both"}))
      ->capture_default_str();
  s_cv->add_option("--mode", cv.mode, "kfold or fixed")
      ->check(CLI::IsMember({"kfold", "fixed"}))
      ->capture_default_str();
  s_cv->add_option("--folds", cv.folds, "Number of folds")->check(CLI::Range(2, 1000))->capture_default_str();
  s_cv->add_option("--train-fraction", cv.train_fraction, "Training share in fixed mode")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  s_cv->add_flag("--no-stratify", cv.no_stratify, "Split without preserving class proportions");
  s_cv->add_option("--json", cv.json, "Write the structured report here");
  add_extract_opts(s_cv, cv.opts);
  add_common(s_cv);

  PredictArgs pr;
  auto* s_predict = app.add_subcommand("predict", "Rank classes for one image or a directory of images");
  s_predict->add_option("--model", pr.model, "Model or ensemble file")->required();
  s_predict->add_option("--image", pr.image, "One PGM image");
  s_predict->add_option("--dir", pr.dir, "Directory searched recursively for PGM images");
  s_predict->add_option("-k,--top", pr.k, "Number of ranked labels to print")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(s_predict);

  SynthArgs sy;
  auto* s_synth = app.add_subcommand("synth", "Write a synthetic glyph corpus");
  s_synth->add_option("--out", sy.out, "Corpus root to create")->required();
  s_synth->add_option("--classes", sy.classes, "Number of classes")->check(CLI::Range(2, 1000))->capture_default_str();
  s_synth->add_option("--per-class", sy.per_class, "Samples per class")->check(CLI::Range(0, 100000))->capture_default_str();
  add_common(s_synth);

  try {
    app.parse(argc, argv);
    if (s_extract->parsed()) return cmd_extract(common, ex);
    if (s_train->parsed()) return cmd_train(common, tr);
    if (s_eval->parsed()) return cmd_eval(common, ev);
    if (s_cv->parsed()) return cmd_crossval(common, cv);
    if (s_predict->parsed()) return cmd_predict(common, pr);
    if (s_synth->parsed()) return cmd_synth(common, sy);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_io_error(e) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace glyphforge::cli
