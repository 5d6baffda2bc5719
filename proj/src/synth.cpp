#include "glyphforge/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "glyphforge/random.hpp"

namespace glyphforge::data {

namespace {

constexpr int kCanvas = 64;
constexpr double kPenRadius = 1.5;
constexpr std::uint64_t kTemplateSeed = 0x67f0a2d1c3b5e497ULL;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

using Stroke = std::vector<Vec2>;
using Glyph = std::vector<Stroke>;

Glyph make_template(int cls) {
  Rng rng(derive_seed(kTemplateSeed, static_cast<std::uint64_t>(cls)));
  Glyph g(2 + rng.below(2));
  for (auto& stroke : g) {
    stroke.resize(2 + rng.below(3));
    for (auto& v : stroke) v = {rng.uniform(12.0, 52.0), rng.uniform(12.0, 52.0)};
  }
  return g;
}

void stamp(GrayImage& img, Vec2 c) {
  const int x0 = static_cast<int>(std::floor(c.x - kPenRadius));
  const int y0 = static_cast<int>(std::floor(c.y - kPenRadius));
  for (int y = y0; y <= y0 + 3; ++y)
    for (int x = x0; x <= x0 + 3; ++x) {
      if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) continue;
      const double dx = x - c.x, dy = y - c.y;
      if (dx * dx + dy * dy <= kPenRadius * kPenRadius) img.at(x, y) = 0;
    }
}

GrayImage render(const Glyph& g) {
  GrayImage img(kCanvas, kCanvas, 255);
  for (const auto& stroke : g)
    for (std::size_t i = 0; i + 1 < stroke.size(); ++i) {
      const Vec2 a = stroke[i], b = stroke[i + 1];
      const double len = std::hypot(b.x - a.x, b.y - a.y);
      const int steps = std::max(1, static_cast<int>(std::ceil(len * 4.0)));
      for (int s = 0; s <= steps; ++s) {
        const double t = static_cast<double>(s) / steps;
        stamp(img, {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
      }
    }
  return img;
}

Glyph perturb(const Glyph& g, Rng& rng) {
  const double scale = rng.uniform(0.85, 1.15);
  const double tx = rng.between(-4, 4);
  const double ty = rng.between(-4, 4);
  constexpr double c = kCanvas / 2.0;
  Glyph out = g;
  for (auto& stroke : out)
    for (auto& v : stroke) {
      const double jx = rng.uniform(-2.0, 2.0);
      const double jy = rng.uniform(-2.0, 2.0);
      v.x = std::clamp(c + scale * (v.x - c) + tx + jx, 2.0, kCanvas - 3.0);
      v.y = std::clamp(c + scale * (v.y - c) + ty + jy, 2.0, kCanvas - 3.0);
    }
  return out;
}

}  // namespace

std::string synth_class_name(int cls) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "c%02d", cls);
  return buf;
}

GrayImage synth_template(int cls) { return render(make_template(cls)); }

std::vector<LabeledSample> synth_corpus(const SynthOptions& opts) {
  std::vector<LabeledSample> out;
  if (opts.classes < 1 || opts.per_class < 1) return out;
  out.reserve(static_cast<std::size_t>(opts.classes) * static_cast<std::size_t>(opts.per_class));
  for (int cls = 0; cls < opts.classes; ++cls) {
    const Glyph tmpl = make_template(cls);
    const std::string label = synth_class_name(cls);
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(cls)));
    for (int i = 0; i < opts.per_class; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "s%04d.pgm", i);
      out.push_back({label + "/" + name, label, render(perturb(tmpl, rng))});
    }
  }
  return out;
}

}  // namespace glyphforge::data
