#pragma once

#include <random>
#include <string>
#include <vector>

#include "mcae/synth/matching.hpp"

namespace mcae {

// Roof line drawings on a 32x32 canvas: an outer footprint with fixed
// corners plus ridge/hip lines whose ends may move.
inline constexpr int kRoofCanvas = 32;

namespace detail {

inline ControlPoint fixed_pt(double x, double y) { return {x, y, Constraint::Fixed, {}}; }

inline void add_footprint(ControlPointSet& s) {
  s.points.push_back(fixed_pt(3, 5));    // 0 A
  s.points.push_back(fixed_pt(28, 5));   // 1 B
  s.points.push_back(fixed_pt(28, 26));  // 2 C
  s.points.push_back(fixed_pt(3, 26));   // 3 D
  s.edges.insert(s.edges.end(), {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
}

}  // namespace detail

/// Rectangle with a ridge running wall to wall; the ridge ends slide along
/// the side walls.
inline PrototypeSpec gable_prototype() {
  PrototypeSpec p{"gable", kRoofCanvas, kRoofCanvas, {}};
  detail::add_footprint(p.initial);
  p.initial.points.push_back({3, 15, Constraint::Boundary, {}});
  p.initial.points.push_back({28, 15, Constraint::Boundary, {}});
  p.initial.edges.emplace_back(4, 5);
  return p;
}

/// Rectangle with a shorter ridge joined to each corner by a hip line.
inline PrototypeSpec hip_prototype() {
  PrototypeSpec p{"hip", kRoofCanvas, kRoofCanvas, {}};
  detail::add_footprint(p.initial);
  p.initial.points.push_back({10, 15, Constraint::Region, {7, 11, 13, 19}});
  p.initial.points.push_back({21, 15, Constraint::Region, {18, 11, 24, 19}});
  p.initial.edges.insert(p.initial.edges.end(), {{4, 5}, {0, 4}, {3, 4}, {1, 5}, {2, 5}});
  return p;
}

/// Rectangle with all four hips meeting at one apex.
inline PrototypeSpec pyramid_prototype() {
  PrototypeSpec p{"pyramid", kRoofCanvas, kRoofCanvas, {}};
  detail::add_footprint(p.initial);
  p.initial.points.push_back({15, 15, Constraint::Region, {11, 11, 20, 20}});
  p.initial.edges.insert(p.initial.edges.end(), {{0, 4}, {1, 4}, {2, 4}, {3, 4}});
  return p;
}

inline std::vector<std::string> roof_styles() { return {"gable", "hip", "pyramid"}; }

inline PrototypeSpec roof_prototype(const std::string& style) {
  if (style == "gable") return gable_prototype();
  if (style == "hip") return hip_prototype();
  if (style == "pyramid") return pyramid_prototype();
  throw InvalidArgument("unknown roof style '" + style + "' (expected gable, hip or pyramid)");
}

/// Render of the edges whose endpoints are both fixed.
inline BinaryImage fixed_frame(const PrototypeSpec& p) {
  ControlPointSet frame;
  frame.points = p.initial.points;
  for (const auto& [a, b] : p.initial.edges)
    if (p.initial.points[a].constraint == Constraint::Fixed &&
        p.initial.points[b].constraint == Constraint::Fixed)
      frame.edges.emplace_back(a, b);
  return render(frame, p.width, p.height);
}

/// Integer offsets in [-jitter, jitter] per coordinate. Fixed points stay,
/// region points are clamped to their box, boundary points are snapped to
/// the nearest pixel of the fixed frame.
inline ControlPointSet jitter_points(const PrototypeSpec& p, double jitter, std::mt19937_64& rng) {
  if (jitter < 0) throw InvalidArgument("jitter must be >= 0");
  const int j = static_cast<int>(std::floor(jitter));
  std::uniform_int_distribution<int> off(-j, j);
  const auto frame = fixed_frame(p);
  std::vector<PixelPos> frame_px;
  for (int y = 0; y < frame.height(); ++y)
    for (int x = 0; x < frame.width(); ++x)
      if (frame.at(x, y)) frame_px.push_back({x, y});

  ControlPointSet s = p.initial;
  for (auto& q : s.points) {
    const int dx = off(rng), dy = off(rng);
    if (q.constraint == Constraint::Fixed) continue;
    double x = std::clamp(q.x + dx, 0.0, double(p.width - 1));
    double y = std::clamp(q.y + dy, 0.0, double(p.height - 1));
    if (q.constraint == Constraint::Region) {
      x = std::clamp(x, double(q.region.x0), double(q.region.x1));
      y = std::clamp(y, double(q.region.y0), double(q.region.y1));
    } else if (q.constraint == Constraint::Boundary && !frame_px.empty()) {
      const auto near = *nearest_pixel(frame_px, x, y);
      x = near.x, y = near.y;
    }
    q.x = x, q.y = y;
  }
  return s;
}

struct RoofItem {
  std::string label;
  ControlPointSet truth;   // jittered points behind the pseudo-real image
  BinaryImage real;        // pseudo-real image
  MatchResult match;       // Syn I recovered from the pseudo-real image
};

/// Pseudo-real roofs: each style jittered and rendered `n_per_style` times,
/// optionally with `clutter` stray foreground pixels, then matched back to
/// the style's prototype. Items are ordered style by style.
inline std::vector<RoofItem> make_toy_roof_corpus(const std::vector<PrototypeSpec>& styles,
                                                  int n_per_style, double jitter,
                                                  std::uint64_t seed, int clutter = 0,
                                                  const MatchOptions& opts = {}) {
  if (n_per_style < 0) throw InvalidArgument("n_per_style must be >= 0");
  if (clutter < 0) throw InvalidArgument("clutter must be >= 0");
  std::mt19937_64 rng(seed);
  std::vector<RoofItem> out;
  for (const auto& style : styles) {
    std::uniform_int_distribution<int> px(0, style.width - 1), py(0, style.height - 1);
    for (int i = 0; i < n_per_style; ++i) {
      RoofItem item;
      item.label = style.class_label;
      item.truth = jitter_points(style, jitter, rng);
      item.real = render(item.truth, style.width, style.height);
      for (int c = 0; c < clutter; ++c) item.real.at(px(rng), py(rng)) = 1;
      item.match = match_synthetic(item.real, style, opts);
      out.push_back(std::move(item));
    }
  }
  return out;
}

}  // namespace mcae
