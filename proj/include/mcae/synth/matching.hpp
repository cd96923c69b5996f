#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mcae/synth/control_points.hpp"
#include "mcae/synth/distance.hpp"

namespace mcae {

/// Dist(U, render(S)) against a fixed reference image U. Caches U's
/// distance field and boundary mask.
class ReferenceImage {
 public:
  explicit ReferenceImage(const BinaryImage& u)
      : u_(u), u_dt_(unsigned_distance(u)), boundary_(boundary_mask(u)) {
    if (foreground_count(u) == 0) throw InvalidArgument("reference image is empty");
  }

  const BinaryImage& image() const noexcept { return u_; }
  int width() const noexcept { return u_.width(); }
  int height() const noexcept { return u_.height(); }
  bool on_boundary(int x, int y) const { return boundary_.contains(x, y) && boundary_.at(x, y); }

  double distance_to(const BinaryImage& v) const {
    if (foreground_count(v) == 0) return std::numeric_limits<double>::infinity();
    return 0.5 * (directed_chamfer(u_, unsigned_distance(v)) + directed_chamfer(v, u_dt_));
  }
  double distance_to(const ControlPointSet& s) const {
    return distance_to(render(s, width(), height()));
  }

  /// Whether p may occupy (x, y) under its constraint.
  bool admissible(const ControlPoint& p, double x, double y) const {
    if (x < 0.0 || y < 0.0 || x > width() - 1 || y > height() - 1) return false;
    switch (p.constraint) {
      case Constraint::Fixed: return x == p.x && y == p.y;
      case Constraint::Region: return p.region.contains(x, y);
      case Constraint::Boundary:
        return on_boundary(static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y)));
      case Constraint::Free: return true;
    }
    return false;
  }

 private:
  BinaryImage u_;
  DistanceField u_dt_;
  BinaryImage boundary_;
};

/// Nearest pixel of `candidates` to (x, y); ties go to the smallest (y, x).
/// Expects candidates in raster order.
inline std::optional<PixelPos> nearest_pixel(const std::vector<PixelPos>& candidates, double x,
                                             double y) {
  std::optional<PixelPos> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    const double d = (c.x - x) * (c.x - x) + (c.y - y) * (c.y - y);
    if (d < best_d) best_d = d, best = c;
  }
  return best;
}

/// Unit moves in evaluation order N, E, S, W.
inline constexpr std::array<std::array<int, 2>, 4> kUnitMoves{{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};

/// One coordinate-descent sweep: for each point in order, evaluate the four
/// unit moves its constraint allows and keep the one that lowers
/// Dist(U, render(S)) the most; ties keep the earliest in N, E, S, W order.
/// Dist never increases.
inline ControlPointSet optimize_cp_coordinate_descent(const ReferenceImage& ref,
                                                      ControlPointSet s, double* dist = nullptr) {
  double current = ref.distance_to(s);
  for (auto& p : s.points) {
    if (p.constraint == Constraint::Fixed) continue;
    const double ox = p.x, oy = p.y;
    double best = current;
    std::optional<std::array<double, 2>> best_pos;
    for (const auto& mv : kUnitMoves) {
      const double nx = ox + mv[0], ny = oy + mv[1];
      if (!ref.admissible(p, nx, ny)) continue;
      p.x = nx, p.y = ny;
      const double d = ref.distance_to(s);
      if (d < best) best = d, best_pos = std::array<double, 2>{nx, ny};
    }
    if (best_pos) {
      p.x = (*best_pos)[0], p.y = (*best_pos)[1];
      current = best;
    } else {
      p.x = ox, p.y = oy;
    }
  }
  if (dist) *dist = current;
  return s;
}

inline ControlPointSet optimize_cp_coordinate_descent(const BinaryImage& u, const ControlPointSet& s) {
  return optimize_cp_coordinate_descent(ReferenceImage(u), s);
}

struct MatchOptions {
  int max_sweeps = 100;
  /// When a sweep changes nothing, also try diagonal single-point moves and
  /// joint unit moves of both ends of an edge before declaring convergence.
  bool compound_moves = true;
};

struct MatchResult {
  ControlPointSet points;
  BinaryImage image;
  bool converged = false;
  int sweeps = 0;
  int compound_steps = 0;  // accepted compound moves
  double initial_distance = 0.0;  // Dist(U, render(prototype)) before any change
  /// Dist after boundary snapping, then after each sweep or compound move.
  std::vector<double> distance_trace;
  double final_distance() const { return distance_trace.back(); }
};

/// Moves every boundary-constrained point onto the nearest boundary pixel of U.
inline ControlPointSet snap_boundary_points(const ReferenceImage& ref, ControlPointSet s) {
  std::vector<PixelPos> candidates;
  for (int y = 0; y < ref.height(); ++y)
    for (int x = 0; x < ref.width(); ++x)
      if (ref.on_boundary(x, y)) candidates.push_back({x, y});
  for (auto& p : s.points) {
    if (p.constraint != Constraint::Boundary) continue;
    if (auto q = nearest_pixel(candidates, p.x, p.y)) p.x = q->x, p.y = q->y;
  }
  return s;
}

/// Best strictly improving compound move: a diagonal step of one point, or
/// unit steps of both endpoints of an edge at once. Returns false if none.
inline bool apply_compound_move(const ReferenceImage& ref, ControlPointSet& s, double& current) {
  static constexpr std::array<std::array<int, 2>, 4> diagonals{{{1, -1}, {1, 1}, {-1, 1}, {-1, -1}}};
  double best = current;
  ControlPointSet best_set;
  auto consider = [&](const ControlPointSet& trial) {
    const double d = ref.distance_to(trial);
    if (d < best) best = d, best_set = trial;
  };
  ControlPointSet trial = s;
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto& p = s.points[i];
    if (p.constraint == Constraint::Fixed) continue;
    for (const auto& mv : diagonals) {
      if (!ref.admissible(p, p.x + mv[0], p.y + mv[1])) continue;
      trial.points[i].x = p.x + mv[0], trial.points[i].y = p.y + mv[1];
      consider(trial);
    }
    trial.points[i] = p;
  }
  for (const auto& [a, b] : s.edges) {
    const auto& pa = s.points[a];
    const auto& pb = s.points[b];
    if (pa.constraint == Constraint::Fixed || pb.constraint == Constraint::Fixed) continue;
    for (const auto& ma : kUnitMoves) {
      if (!ref.admissible(pa, pa.x + ma[0], pa.y + ma[1])) continue;
      for (const auto& mb : kUnitMoves) {
        if (!ref.admissible(pb, pb.x + mb[0], pb.y + mb[1])) continue;
        trial.points[a].x = pa.x + ma[0], trial.points[a].y = pa.y + ma[1];
        trial.points[b].x = pb.x + mb[0], trial.points[b].y = pb.y + mb[1];
        consider(trial);
      }
    }
    trial.points[a] = pa;
    trial.points[b] = pb;
  }
  if (best >= current) return false;
  s = std::move(best_set);
  current = best;
  return true;
}

/// Iterates coordinate-descent sweeps from the prototype until a sweep moves
/// no point (and no compound move helps, if enabled) or max_sweeps is
/// reached (converged = false, still a result).
inline MatchResult match_synthetic(const BinaryImage& u, const PrototypeSpec& proto,
                                   const MatchOptions& opts = {}) {
  if (!u.same_size(proto.width, proto.height))
    throw InvalidArgument("match_synthetic: prototype canvas " + std::to_string(proto.width) +
                          "x" + std::to_string(proto.height) + " differs from image " +
                          std::to_string(u.width()) + "x" + std::to_string(u.height()));
  const ReferenceImage ref(u);
  MatchResult res;
  res.initial_distance = ref.distance_to(proto.initial);
  ControlPointSet s = snap_boundary_points(ref, proto.initial);
  res.distance_trace.push_back(ref.distance_to(s));
  while (res.sweeps < opts.max_sweeps) {
    double d = 0.0;
    ControlPointSet next = optimize_cp_coordinate_descent(ref, s, &d);
    ++res.sweeps;
    res.distance_trace.push_back(d);
    const bool changed = next != s;
    s = std::move(next);
    if (changed) continue;
    if (opts.compound_moves && apply_compound_move(ref, s, d)) {
      ++res.compound_steps;
      res.distance_trace.push_back(d);
      continue;
    }
    res.converged = true;
    break;
  }
  res.image = render(s, u.width(), u.height());
  res.points = std::move(s);
  return res;
}

struct MigrationResult {
  ControlPointSet points;
  int steps = 0;
};

/// Moves control points from the shape V toward the shape U through a series
/// of intermediate shapes: the binarized blends (1 - i/steps) V' + (i/steps) U'
/// of their signed distance fields, i = 1..steps. At each step every point
/// snaps to the nearest boundary pixel of the intermediate shape (ties by
/// smallest (y, x)). The last intermediate shape is U itself.
inline MigrationResult migrate_control_points(const BinaryImage& u, const BinaryImage& v,
                                              const ControlPointSet& s, int steps = 10) {
  if (!u.same_size(v)) throw InvalidArgument("migrate_control_points: image sizes differ");
  if (steps < 1) throw InvalidArgument("migrate_control_points: steps must be >= 1");
  for (const auto* img : {&u, &v}) {
    const auto fg = foreground_count(*img);
    if (fg == 0 || fg == img->size())
      throw InvalidArgument("migrate_control_points: images need both foreground and background");
  }
  const DistanceField u_dt = distance_transform(u);
  const DistanceField v_dt = distance_transform(v);
  MigrationResult res{s, 0};
  for (int i = 1; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const BinaryImage inter = binarize(blend(v_dt, u_dt, t));
    const auto candidates = boundary_pixels(inter);
    if (candidates.empty())
      throw MigrationError("migrate_control_points: intermediate image at step " +
                           std::to_string(i) + " is empty");
    for (auto& p : res.points.points) {
      const auto q = nearest_pixel(candidates, p.x, p.y);
      p.x = q->x;
      p.y = q->y;
    }
    res.steps = i;
  }
  return res;
}

}  // namespace mcae
