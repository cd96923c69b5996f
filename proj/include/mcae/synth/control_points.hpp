#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "mcae/synth/image.hpp"

namespace mcae {

enum class Constraint { Free, Region, Boundary, Fixed };

inline std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::Free: return "free";
    case Constraint::Region: return "region";
    case Constraint::Boundary: return "boundary";
    case Constraint::Fixed: return "fixed";
  }
  return "free";
}

inline Constraint constraint_from_string(const std::string& s) {
  if (s == "free") return Constraint::Free;
  if (s == "region") return Constraint::Region;
  if (s == "boundary") return Constraint::Boundary;
  if (s == "fixed") return Constraint::Fixed;
  throw InvalidArgument("unknown control point constraint '" + s + "'");
}

/// Inclusive pixel box a Region-constrained point may not leave.
struct Region {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  bool operator==(const Region&) const = default;
};

struct ControlPoint {
  double x = 0.0;
  double y = 0.0;
  Constraint constraint = Constraint::Free;
  Region region{};  // used when constraint == Region

  PixelPos pixel() const {
    return {static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y))};
  }
  bool operator==(const ControlPoint&) const = default;
};

/// S = {P, E}: ordered points plus index-pair edges. Point order is stable;
/// interpolation pairs points by index.
struct ControlPointSet {
  std::vector<ControlPoint> points;
  std::vector<std::pair<int, int>> edges;

  void validate() const {
    const int n = static_cast<int>(points.size());
    for (const auto& [a, b] : edges) {
      if (a < 0 || b < 0 || a >= n || b >= n)
        throw InvalidArgument("edge (" + std::to_string(a) + "," + std::to_string(b) +
                              ") references a missing point");
      if (a == b) throw InvalidArgument("self-loop edge at point " + std::to_string(a));
    }
  }
  bool operator==(const ControlPointSet&) const = default;
};

/// Class-level starting shape for matching.
struct PrototypeSpec {
  std::string class_label;
  int width = 0;
  int height = 0;
  ControlPointSet initial;
};

inline bool inside_canvas(const ControlPoint& p, int w, int h) {
  return p.x >= 0.0 && p.y >= 0.0 && p.x <= w - 1 && p.y <= h - 1;
}

/// Integer line stepping from a to b (inclusive), one pixel per step along
/// the major axis.
inline void draw_line(BinaryImage& img, PixelPos a, PixelPos b) {
  int x = a.x, y = a.y;
  const int dx = std::abs(b.x - a.x), dy = -std::abs(b.y - a.y);
  const int sx = a.x < b.x ? 1 : -1, sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  while (true) {
    img.at(x, y) = 1;
    if (x == b.x && y == b.y) break;
    const int e2 = 2 * err;
    if (e2 >= dy) err += dy, x += sx;
    if (e2 <= dx) err += dx, y += sy;
  }
}

/// Rasterizes every edge as a 1-pixel line between rounded endpoints.
inline BinaryImage render(const ControlPointSet& s, int w, int h) {
  s.validate();
  for (std::size_t i = 0; i < s.points.size(); ++i)
    if (!inside_canvas(s.points[i], w, h))
      throw InvalidArgument("render: point " + std::to_string(i) + " (" +
                            std::to_string(s.points[i].x) + "," + std::to_string(s.points[i].y) +
                            ") outside " + std::to_string(w) + "x" + std::to_string(h) +
                            " canvas");
  BinaryImage img(w, h, 0);
  for (const auto& [a, b] : s.edges) draw_line(img, s.points[a].pixel(), s.points[b].pixel());
  return img;
}

inline BinaryImage render(const PrototypeSpec& p) { return render(p.initial, p.width, p.height); }

enum class BlendMode { Interpolate, Extrapolate };

inline std::string to_string(BlendMode m) {
  return m == BlendMode::Interpolate ? "interpolate" : "extrapolate";
}

/// Interpolate: (1 - w) s1 + w s2. Extrapolate: s1 + w (s1 - s2). Results are
/// clamped to the w x h canvas; edges and constraints come from s1.
inline ControlPointSet interpolate_cp(const ControlPointSet& s1, const ControlPointSet& s2,
                                      double w, BlendMode mode, int width, int height) {
  if (s1.points.size() != s2.points.size() || s1.edges != s2.edges)
    throw InvalidArgument("interpolate_cp: point sets differ in structure");
  ControlPointSet out = s1;
  for (std::size_t i = 0; i < s1.points.size(); ++i) {
    const auto& a = s1.points[i];
    const auto& b = s2.points[i];
    double x, y;
    if (mode == BlendMode::Interpolate) {
      x = (1.0 - w) * a.x + w * b.x;
      y = (1.0 - w) * a.y + w * b.y;
    } else {
      x = a.x + w * (a.x - b.x);
      y = a.y + w * (a.y - b.y);
    }
    out.points[i].x = std::clamp(x, 0.0, double(width - 1));
    out.points[i].y = std::clamp(y, 0.0, double(height - 1));
  }
  return out;
}

}  // namespace mcae
