#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace glyphforge {

/// Row-major 8-bit grayscale image; 0 is black, 255 is white.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 255);
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }
  const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Row-major bitmap; true marks a foreground (ink) pixel.
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(int width, int height, bool fill = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool in_bounds(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool at(int x, int y) const { return pixels_[index(x, y)] != 0; }
  /// Out-of-bounds reads are background.
  bool get(int x, int y) const noexcept { return in_bounds(x, y) && at(x, y); }
  void set(int x, int y, bool v) { pixels_[index(x, y)] = v ? 1 : 0; }

  std::size_t count() const noexcept;
  bool any() const noexcept { return count() > 0; }

  /// Parse from rows of '#' (foreground) and '.' (background); handy in tests.
  static BinaryImage from_rows(const std::vector<std::string_view>& rows);

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Reads binary (P5) or ASCII (P2) PGM with maxval <= 255.
GrayImage read_pgm(const std::filesystem::path& path);
GrayImage parse_pgm(std::string_view bytes);

/// Writes binary P5 with maxval 255.
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

/// Foreground becomes 0, background 255.
GrayImage to_gray(const BinaryImage& img);

}  // namespace glyphforge
