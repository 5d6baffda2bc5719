#include "glyphforge/model_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "glyphforge/errors.hpp"

namespace glyphforge::model_io {

namespace {

constexpr int kVersion = 1;

void write_row(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ' ';
    out << format_real(values[i]);
  }
  out << '\n';
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string next_line() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty() && line[0] != '#') return line;
    }
    throw FormatError("model file: unexpected end of file");
  }

  /// Reads "<key> <rest>" and returns rest.
  std::string expect(const std::string& key) {
    const auto line = next_line();
    if (line.compare(0, key.size(), key) != 0 ||
        (line.size() > key.size() && line[key.size()] != ' '))
      fail("expected '" + key + "', found '" + line + "'");
    return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
  }

  std::size_t expect_count(const std::string& key) { return parse_count(expect(key)); }
  double expect_real(const std::string& key) { return parse_real(expect(key)); }

  std::vector<double> read_row(std::size_t n) {
    std::istringstream ss(next_line());
    std::vector<double> row;
    row.reserve(n);
    std::string tok;
    while (ss >> tok) row.push_back(parse_real(tok));
    if (row.size() != n)
      fail("expected " + std::to_string(n) + " values, found " + std::to_string(row.size()));
    return row;
  }

  std::size_t parse_count(const std::string& s) const {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || errno != 0 || *end != '\0' || s[0] == '-') fail("bad count '" + s + "'");
    return static_cast<std::size_t>(v);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError("model file line " + std::to_string(line_no_) + ": " + msg);
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

void write_matrix(std::ostream& out, const char* key, const mlp::Matrix& m) {
  out << key << ' ' << m.rows << ' ' << m.cols << '\n';
  for (std::size_t r = 0; r < m.rows; ++r) write_row(out, m.row(r));
}

mlp::Matrix read_matrix(LineReader& in, const std::string& key) {
  std::istringstream ss(in.expect(key));
  std::size_t rows = 0, cols = 0;
  if (!(ss >> rows >> cols)) in.fail("bad matrix header for " + key);
  mlp::Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = in.read_row(cols);
    std::copy(row.begin(), row.end(), m.data.begin() + static_cast<std::ptrdiff_t>(r * cols));
  }
  return m;
}

std::vector<double> read_vector(LineReader& in, const std::string& key) {
  const std::size_t n = in.expect_count(key);
  return in.read_row(n);
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(const std::string& token) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(token.c_str(), &end);
  // Underflow to a subnormal is fine (and round trips); overflow, NaN and
  // infinities are not.
  if (token.empty() || *end != '\0' || !std::isfinite(v) || (errno == ERANGE && std::fabs(v) > 1.0))
    throw FormatError("bad real number '" + token + "'");
  return v;
}

void write_model(std::ostream& out, const mlp::MlpModel& m) {
  m.validate();
  const auto& c = m.config;
  out << "format glyphforge-mlp\n"
      << "version " << kVersion << '\n'
      << "extractor " << (m.extractor.empty() ? "generic" : m.extractor) << '\n'
      << "normalize " << (m.extract_options.normalize ? 1 : 0) << '\n'
      << "log_moments " << (m.extract_options.log_moments ? 1 : 0) << '\n'
      << "input_size " << c.input_size << '\n'
      << "hidden_size " << c.hidden_size << '\n'
      << "output_size " << c.output_size << '\n'
      << "learning_rate " << format_real(c.learning_rate) << '\n'
      << "momentum " << format_real(c.momentum) << '\n'
      << "max_epochs " << c.max_epochs << '\n'
      << "target_mse " << format_real(c.target_mse) << '\n'
      << "seed " << c.seed << '\n';
  if (m.fusion)
    out << "fusion " << format_real(m.fusion->success_rate) << ' '
        << format_real(m.fusion->weight) << '\n';
  else
    out << "fusion none\n";
  out << "labels " << m.labels.size() << '\n';
  for (const auto& l : m.labels) out << "label " << l << '\n';
  out << "scaler " << m.scaler.lo.size() << '\n';
  if (!m.scaler.empty()) {
    write_row(out, m.scaler.lo);
    write_row(out, m.scaler.hi);
  }
  write_matrix(out, "w1", m.w1);
  out << "b1 " << m.b1.size() << '\n';
  write_row(out, m.b1);
  write_matrix(out, "w2", m.w2);
  out << "b2 " << m.b2.size() << '\n';
  write_row(out, m.b2);
  out << "end\n";
}

mlp::MlpModel read_model(std::istream& is) {
  LineReader in(is);
  if (in.expect("format") != "glyphforge-mlp") in.fail("not a glyphforge-mlp model file");
  if (in.expect_count("version") != kVersion) in.fail("unsupported model version");

  mlp::MlpModel m;
  m.extractor = in.expect("extractor");
  if (m.extractor == "generic") m.extractor.clear();
  m.extract_options.normalize = in.expect_count("normalize") != 0;
  m.extract_options.log_moments = in.expect_count("log_moments") != 0;
  auto& c = m.config;
  c.input_size = in.expect_count("input_size");
  c.hidden_size = in.expect_count("hidden_size");
  c.output_size = in.expect_count("output_size");
  c.learning_rate = in.expect_real("learning_rate");
  c.momentum = in.expect_real("momentum");
  c.max_epochs = in.expect_count("max_epochs");
  c.target_mse = in.expect_real("target_mse");
  c.seed = in.expect_count("seed");

  const auto fusion = in.expect("fusion");
  if (fusion != "none") {
    std::istringstream ss(fusion);
    std::string d, w;
    if (!(ss >> d >> w)) in.fail("bad fusion record");
    m.fusion = mlp::FusionSlot{parse_real(d), parse_real(w)};
  }

  const std::size_t n_labels = in.expect_count("labels");
  for (std::size_t i = 0; i < n_labels; ++i) {
    auto l = in.expect("label");
    if (l.empty()) in.fail("empty label");
    m.labels.push_back(std::move(l));
  }
  const std::size_t n_scaler = in.expect_count("scaler");
  if (n_scaler > 0) {
    m.scaler.lo = in.read_row(n_scaler);
    m.scaler.hi = in.read_row(n_scaler);
  }
  m.w1 = read_matrix(in, "w1");
  m.b1 = read_vector(in, "b1");
  m.w2 = read_matrix(in, "w2");
  m.b2 = read_vector(in, "b2");
  in.expect("end");
  try {
    m.validate();
  } catch (const ShapeError& e) {
    throw FormatError(std::string("model file is inconsistent: ") + e.what());
  }
  return m;
}

void save_model(const std::filesystem::path& path, const mlp::MlpModel& model) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  write_model(f, model);
  if (!f) throw IoError("write failed: " + path.string());
}

mlp::MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());
  try {
    return read_model(f);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_ensemble(const std::filesystem::path& path, const ensemble::EnsembleModel& model,
                   const std::string& member1_rel, const std::string& member2_rel) {
  model.validate();
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  const auto& w = model.weights;
  f << "format glyphforge-ensemble\n"
    << "version " << kVersion << '\n'
    << "member1 " << member1_rel << '\n'
    << "member2 " << member2_rel << '\n'
    << "d1 " << format_real(w.d1) << '\n'
    << "d2 " << format_real(w.d2) << '\n'
    << "w1 " << format_real(w.w1) << '\n'
    << "w2 " << format_real(w.w2) << '\n'
    << "end\n";
  if (!f) throw IoError("write failed: " + path.string());
}

ensemble::EnsembleModel load_ensemble(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());
  try {
    LineReader in(f);
    if (in.expect("format") != "glyphforge-ensemble") in.fail("not a glyphforge-ensemble file");
    if (in.expect_count("version") != kVersion) in.fail("unsupported ensemble version");
    const auto dir = path.parent_path();
    ensemble::EnsembleModel e;
    const auto m1 = in.expect("member1");
    const auto m2 = in.expect("member2");
    e.weights.d1 = in.expect_real("d1");
    e.weights.d2 = in.expect_real("d2");
    e.weights.w1 = in.expect_real("w1");
    e.weights.w2 = in.expect_real("w2");
    in.expect("end");
    e.model1 = load_model(dir / m1);
    e.model2 = load_model(dir / m2);
    e.validate();
    return e;
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string sniff_format(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "format glyphforge-mlp") return "glyphforge-mlp";
    if (line == "format glyphforge-ensemble") return "glyphforge-ensemble";
    return "";
  }
  return "";
}

}  // namespace glyphforge::model_io
