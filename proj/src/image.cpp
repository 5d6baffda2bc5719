#include "glyphforge/image.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <string>

#include "glyphforge/errors.hpp"

namespace glyphforge {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) throw ShapeError("image dimensions must be positive");
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) throw ShapeError("image dimensions must be positive");
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw ShapeError("pixel count does not match image dimensions");
}

BinaryImage::BinaryImage(int width, int height, bool fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) throw ShapeError("image dimensions must be non-negative");
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                 fill ? 1 : 0);
}

std::size_t BinaryImage::count() const noexcept {
  return static_cast<std::size_t>(std::count(pixels_.begin(), pixels_.end(), 1));
}

BinaryImage BinaryImage::from_rows(const std::vector<std::string_view>& rows) {
  const int h = static_cast<int>(rows.size());
  const int w = h == 0 ? 0 : static_cast<int>(rows.front().size());
  BinaryImage img(w, h);
  for (int y = 0; y < h; ++y) {
    if (static_cast<int>(rows[y].size()) != w) throw ShapeError("ragged rows");
    for (int x = 0; x < w; ++x) img.set(x, y, rows[y][x] == '#');
  }
  return img;
}

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::string_view bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  int read_int() {
    skip_space_and_comments();
    int value = 0;
    const char* first = bytes_.data() + pos_;
    const char* last = bytes_.data() + bytes_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) throw FormatError("PGM: expected integer");
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw FormatError("PGM: truncated pixel data");
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  void skip_one_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      throw FormatError("PGM: missing whitespace after header");
    ++pos_;
  }

  std::string_view magic() { return take(2); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint8_t rescale(int v, int maxval) {
  if (v < 0 || v > maxval) throw FormatError("PGM: sample exceeds maxval");
  if (maxval == 255) return static_cast<std::uint8_t>(v);
  return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
}

}  // namespace

GrayImage parse_pgm(std::string_view bytes) {
  PgmReader in(bytes);
  if (bytes.size() < 2) throw FormatError("PGM: file too short");
  const auto magic = in.magic();
  const bool binary = magic == "P5";
  if (!binary && magic != "P2") throw FormatError("PGM: unsupported magic '" + std::string(magic) + "'");
  const int width = in.read_int();
  const int height = in.read_int();
  const int maxval = in.read_int();
  if (width < 1 || height < 1) throw FormatError("PGM: non-positive dimensions");
  if (maxval < 1 || maxval > 255) throw FormatError("PGM: maxval must be in [1,255]");

  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> pixels(n);
  if (binary) {
    in.skip_one_whitespace();
    const auto raw = in.take(n);
    for (std::size_t i = 0; i < n; ++i)
      pixels[i] = rescale(static_cast<unsigned char>(raw[i]), maxval);
  } else {
    for (std::size_t i = 0; i < n; ++i) pixels[i] = rescale(in.read_int(), maxval);
  }
  return GrayImage(width, height, std::move(pixels));
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  try {
    return parse_pgm(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.pixels().data()),
          static_cast<std::streamsize>(img.pixels().size()));
  if (!f) throw IoError("write failed: " + path.string());
}

GrayImage to_gray(const BinaryImage& img) {
  GrayImage out(std::max(img.width(), 1), std::max(img.height(), 1), 255);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (img.at(x, y)) out.at(x, y) = 0;
  return out;
}

}  // namespace glyphforge
