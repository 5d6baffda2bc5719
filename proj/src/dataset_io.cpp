#include "glyphforge/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "glyphforge/errors.hpp"
#include "glyphforge/features.hpp"
#include "glyphforge/model_io.hpp"

namespace fs = std::filesystem;

namespace glyphforge::data {

Corpus load_corpus(const fs::path& root, bool strict) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw CorpusError("corpus root is not a directory: " + root.string());

  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  std::sort(class_dirs.begin(), class_dirs.end());

  Corpus corpus;
  for (const auto& dir : class_dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    const std::string label = dir.filename().string();
    for (const auto& file : files) {
      const std::string id = label + "/" + file.filename().string();
      try {
        corpus.samples.push_back({id, label, read_pgm(file)});
      } catch (const Error& e) {
        if (strict) throw IoError(file.string() + ": " + e.what());
        corpus.warnings.push_back(std::string("skipped ") + e.what());
      }
    }
  }
  if (corpus.samples.empty()) throw CorpusError("corpus has no readable samples: " + root.string());
  return corpus;
}

void FeatureTable::validate() const {
  std::size_t expected = 0;
  try {
    expected = extractor_dim(parse_extractor(extractor_id));
  } catch (const FormatError&) {
    throw FormatError("feature table: unknown extractor '" + extractor_id + "'");
  }
  if (dim != expected)
    throw FormatError("feature table: extractor " + extractor_id + " has dim " +
                      std::to_string(expected) + ", header says " + std::to_string(dim));
  for (const auto& r : rows)
    if (r.values.size() != dim)
      throw FormatError("feature table: row '" + r.id + "' has " + std::to_string(r.values.size()) +
                        " values, expected " + std::to_string(dim));
}

namespace {

void check_field(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_of(",\n\r") != std::string::npos)
    throw FormatError(std::string("feature table: ") + what + " '" + s +
                      "' is empty or contains a comma/newline");
}

}  // namespace

void save_features(const fs::path& path, const FeatureTable& table) {
  table.validate();
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << "# extractor=" << table.extractor_id << " dim=" << table.dim << '\n';
  f << "id,label";
  for (std::size_t i = 1; i <= table.dim; ++i) f << ",v" << i;
  f << '\n';
  for (const auto& r : table.rows) {
    check_field(r.id, "id");
    check_field(r.label, "label");
    f << r.id << ',' << r.label;
    for (double v : r.values) f << ',' << model_io::format_real(v);
    f << '\n';
  }
  if (!f) throw IoError("write failed: " + path.string());
}

FeatureTable load_features(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());
  auto fail = [&](std::size_t line, const std::string& msg) -> FormatError {
    return FormatError(path.string() + ":" + std::to_string(line) + ": " + msg);
  };

  std::string line;
  if (!std::getline(f, line)) throw fail(1, "missing header");
  FeatureTable t;
  {
    std::istringstream ss(line);
    std::string hash, ex, dim;
    if (!(ss >> hash >> ex >> dim) || hash != "#" || ex.rfind("extractor=", 0) != 0 ||
        dim.rfind("dim=", 0) != 0)
      throw fail(1, "header must read '# extractor=<id> dim=<n>'");
    t.extractor_id = ex.substr(10);
    try {
      t.dim = static_cast<std::size_t>(std::stoul(dim.substr(4)));
    } catch (const std::exception&) {
      throw fail(1, "bad dim '" + dim + "'");
    }
  }
  try {
    t.validate();
  } catch (const FormatError& e) {
    throw fail(1, e.what());
  }

  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("id,label", 0) == 0) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != t.dim + 2)
      throw fail(line_no, "expected " + std::to_string(t.dim + 2) + " fields, found " +
                              std::to_string(fields.size()));
    FeatureRow row{fields[0], fields[1], {}};
    row.values.reserve(t.dim);
    try {
      for (std::size_t i = 2; i < fields.size(); ++i)
        row.values.push_back(model_io::parse_real(fields[i]));
    } catch (const FormatError& e) {
      throw fail(line_no, e.what());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<std::string> class_table(const std::vector<std::string>& labels) {
  std::set<std::string> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

FeatureTable align_to(const FeatureTable& reference, const FeatureTable& other) {
  if (reference.rows.size() != other.rows.size())
    throw FormatError("feature tables have different row counts (" +
                      std::to_string(reference.rows.size()) + " vs " +
                      std::to_string(other.rows.size()) + ")");
  std::unordered_map<std::string, const FeatureRow*> by_id;
  for (const auto& r : other.rows) by_id.emplace(r.id, &r);
  FeatureTable out{other.extractor_id, other.dim, {}};
  out.rows.reserve(other.rows.size());
  for (const auto& r : reference.rows) {
    auto it = by_id.find(r.id);
    if (it == by_id.end()) throw FormatError("sample '" + r.id + "' missing from " + other.extractor_id + " table");
    if (it->second->label != r.label) throw FormatError("sample '" + r.id + "' has conflicting labels");
    out.rows.push_back(*it->second);
  }
  return out;
}

void write_corpus(const fs::path& root, const std::vector<LabeledSample>& samples) {
  for (const auto& s : samples) {
    const auto dir = root / s.label;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_pgm(dir / fs::path(s.id).filename(), s.image);
  }
}

}  // namespace glyphforge::data
