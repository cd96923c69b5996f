#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcae/synth/control_points.hpp"

namespace mcae {

/// Per-image affine alignment. The aligned image samples the source at
/// A (p - c) + c + t, with c the canvas centre and
/// A = Rot(rotation) * [[exp(log_sx), shear], [0, exp(log_sy)]].
struct AffineParams {
  double tx = 0.0;
  double ty = 0.0;
  double rotation = 0.0;
  double log_sx = 0.0;
  double log_sy = 0.0;
  double shear = 0.0;

  static constexpr int kCount = 6;
  double& operator[](int i) {
    std::array<double*, kCount> f{&tx, &ty, &rotation, &log_sx, &log_sy, &shear};
    return *f[static_cast<std::size_t>(i)];
  }
  double operator[](int i) const { return const_cast<AffineParams&>(*this)[i]; }
  bool operator==(const AffineParams&) const = default;
};

/// Bilinear sample, zero outside the canvas.
inline double sample_bilinear(const GrayImage& g, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0, fy = y - y0;
  auto px = [&](int xx, int yy) { return g.contains(xx, yy) ? g.at(xx, yy) : 0.0; };
  return (1 - fx) * (1 - fy) * px(x0, y0) + fx * (1 - fy) * px(x0 + 1, y0) +
         (1 - fx) * fy * px(x0, y0 + 1) + fx * fy * px(x0 + 1, y0 + 1);
}

/// Resamples the image under the transform and thresholds at 0.5.
inline BinaryImage apply_affine(const BinaryImage& src, const AffineParams& a) {
  const GrayImage g = to_gray(src);
  const double cx = 0.5 * (src.width() - 1), cy = 0.5 * (src.height() - 1);
  const double sx = std::exp(a.log_sx), sy = std::exp(a.log_sy);
  const double c = std::cos(a.rotation), s = std::sin(a.rotation);
  // A = R * [[sx, shear], [0, sy]]
  const double a00 = c * sx, a01 = c * a.shear - s * sy;
  const double a10 = s * sx, a11 = s * a.shear + c * sy;
  BinaryImage out(src.width(), src.height(), 0);
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x) {
      const double dx = x - cx, dy = y - cy;
      const double u = a00 * dx + a01 * dy + cx + a.tx;
      const double v = a10 * dx + a11 * dy + cy + a.ty;
      out.at(x, y) = sample_bilinear(g, u, v) >= 0.5 ? 1 : 0;
    }
  return out;
}

struct CongealOptions {
  /// Initial coordinate step per parameter (tx, ty, rotation, log_sx, log_sy, shear).
  std::array<double, AffineParams::kCount> initial_step{1.0, 1.0, 0.1, 0.05, 0.05, 0.05};
  int halvings = 3;      // step refinements after the first converged pass
  int max_passes = 200;  // total passes over the stack
};

struct CongealResult {
  GrayImage prototype;  // pixelwise mean of the aligned stack
  std::vector<AffineParams> transforms;
  /// Stack entropy at the start and after every accepted step.
  std::vector<double> entropy_trace;
};

namespace detail {

inline double bernoulli_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

}  // namespace detail

/// Sum over pixels of the entropy of Bernoulli(mean of the stack at that pixel).
inline double stack_entropy(const std::vector<int>& counts, int n) {
  double h = 0.0;
  for (int c : counts) h += detail::bernoulli_entropy(static_cast<double>(c) / n);
  return h;
}

/// Joint alignment by coordinate descent on the pixel-stack entropy. Each
/// parameter of each image is tried at +/- its current step; a change is kept
/// only if it strictly lowers the entropy. Steps halve when a full pass
/// accepts nothing.
inline CongealResult congeal(const std::vector<BinaryImage>& images, const CongealOptions& opts = {}) {
  if (images.size() < 2) throw InvalidArgument("congeal: needs at least 2 images");
  const int w = images.front().width(), h = images.front().height();
  for (const auto& im : images)
    if (!im.same_size(w, h)) throw InvalidArgument("congeal: images differ in size");

  const int n = static_cast<int>(images.size());
  CongealResult res;
  res.transforms.assign(images.size(), AffineParams{});
  std::vector<BinaryImage> aligned = images;
  std::vector<int> counts(static_cast<std::size_t>(w) * h, 0);
  for (const auto& a : aligned)
    for (std::size_t i = 0; i < a.size(); ++i) counts[i] += a[i];

  // Entropy change from replacing one aligned image by another.
  auto delta_entropy = [&](const BinaryImage& old_img, const BinaryImage& new_img) {
    double d = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (old_img[i] == new_img[i]) continue;
      const int c = counts[i];
      const int c2 = c - old_img[i] + new_img[i];
      d += detail::bernoulli_entropy(double(c2) / n) - detail::bernoulli_entropy(double(c) / n);
    }
    return d;
  };

  double entropy = stack_entropy(counts, n);
  res.entropy_trace.push_back(entropy);
  auto step = opts.initial_step;
  int halvings_left = opts.halvings;
  for (int pass = 0; pass < opts.max_passes; ++pass) {
    bool accepted_any = false;
    for (int k = 0; k < n; ++k) {
      for (int p = 0; p < AffineParams::kCount; ++p) {
        double best_d = 0.0;
        std::optional<AffineParams> best;
        BinaryImage best_img;
        for (double sign : {1.0, -1.0}) {
          AffineParams trial = res.transforms[k];
          trial[p] += sign * step[static_cast<std::size_t>(p)];
          BinaryImage img = apply_affine(images[k], trial);
          const double d = delta_entropy(aligned[k], img);
          if (d < best_d - 1e-12) best_d = d, best = trial, best_img = std::move(img);
        }
        if (!best) continue;
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += best_img[i] - aligned[k][i];
        aligned[k] = std::move(best_img);
        res.transforms[k] = *best;
        // Recompute rather than accumulate so the trace carries no drift.
        entropy = stack_entropy(counts, n);
        res.entropy_trace.push_back(entropy);
        accepted_any = true;
      }
    }
    if (!accepted_any) {
      if (halvings_left-- <= 0) break;
      for (auto& s : step) s *= 0.5;
    }
  }

  res.prototype = GrayImage(w, h, 0.0);
  for (std::size_t i = 0; i < counts.size(); ++i) res.prototype[i] = double(counts[i]) / n;
  return res;
}

/// 8-connected components; returns the label image (0 = background) and the
/// pixel count of each label (index 0 unused). Labels follow raster order.
inline std::pair<std::vector<int>, std::vector<int>> label_components(const BinaryImage& b) {
  std::vector<int> labels(b.size(), 0);
  std::vector<int> sizes{0};
  std::vector<PixelPos> stack;
  for (int y = 0; y < b.height(); ++y)
    for (int x = 0; x < b.width(); ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * b.width() + x;
      if (!b[idx] || labels[idx]) continue;
      const int label = static_cast<int>(sizes.size());
      sizes.push_back(0);
      stack.push_back({x, y});
      labels[idx] = label;
      while (!stack.empty()) {
        const PixelPos p = stack.back();
        stack.pop_back();
        ++sizes[label];
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx, ny = p.y + dy;
            if (!b.contains(nx, ny)) continue;
            const std::size_t ni = static_cast<std::size_t>(ny) * b.width() + nx;
            if (b[ni] && !labels[ni]) labels[ni] = label, stack.push_back({nx, ny});
          }
      }
    }
  return {std::move(labels), std::move(sizes)};
}

/// Largest 8-connected component (earliest in raster order on ties).
inline BinaryImage largest_component(const BinaryImage& b) {
  const auto [labels, sizes] = label_components(b);
  BinaryImage out(b.width(), b.height(), 0);
  if (sizes.size() < 2) return out;
  const int best = static_cast<int>(std::max_element(sizes.begin() + 1, sizes.end()) - sizes.begin());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = labels[i] == best ? 1 : 0;
  return out;
}

/// Outer contour of a single 8-connected component by Moore-neighbour
/// tracing, clockwise (y down) from its first pixel in raster order. Stops
/// when the start pixel is re-entered from the initial direction.
inline std::vector<PixelPos> trace_boundary(const BinaryImage& component) {
  PixelPos start{-1, -1};
  for (int y = 0; y < component.height() && start.x < 0; ++y)
    for (int x = 0; x < component.width(); ++x)
      if (component.at(x, y)) {
        start = {x, y};
        break;
      }
  if (start.x < 0) return {};

  // Clockwise neighbour offsets starting at west.
  constexpr int dx[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
  constexpr int dy[8] = {0, -1, -1, -1, 0, 1, 1, 1};
  auto fg = [&](int x, int y) { return component.contains(x, y) && component.at(x, y); };

  std::vector<PixelPos> contour{start};
  PixelPos cur = start;
  int back = 0;  // direction from cur to the backtrack pixel; west of start is background
  const int start_back = back;
  const std::size_t limit = 4 * component.size() + 8;
  while (contour.size() < limit) {
    int found = -1;
    for (int i = 1; i <= 8; ++i) {
      const int d = (back + i) % 8;
      if (fg(cur.x + dx[d], cur.y + dy[d])) {
        found = d;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel
    const PixelPos next{cur.x + dx[found], cur.y + dy[found]};
    // New backtrack: the neighbour checked just before `found`, seen from next.
    const int prev_dir = (found + 7) % 8;
    const PixelPos b{cur.x + dx[prev_dir], cur.y + dy[prev_dir]};
    int nb = 0;
    for (int d = 0; d < 8; ++d)
      if (next.x + dx[d] == b.x && next.y + dy[d] == b.y) nb = d;
    if (next == start && nb == start_back) break;
    cur = next;
    back = nb;
    contour.push_back(cur);
  }
  return contour;
}

/// n points at equal arc-length (contour pixel count) spacing along the outer
/// boundary of the largest component of the thresholded prototype, joined in
/// a closed loop.
inline ControlPointSet sample_boundary_points(const GrayImage& proto, int n) {
  if (n < 3) throw InvalidArgument("sample_boundary_points: n must be >= 3");
  const auto contour = trace_boundary(largest_component(threshold(proto, 0.5)));
  if (contour.empty()) throw InvalidArgument("sample_boundary_points: prototype has no boundary");
  const auto length = contour.size();
  if (static_cast<std::size_t>(n) > length)
    throw InvalidArgument("sample_boundary_points: n = " + std::to_string(n) +
                          " exceeds boundary length " + std::to_string(length));
  ControlPointSet s;
  for (int i = 0; i < n; ++i) {
    const auto& p = contour[static_cast<std::size_t>(i) * length / static_cast<std::size_t>(n)];
    s.points.push_back({double(p.x), double(p.y), Constraint::Free, {}});
    s.edges.emplace_back(i, (i + 1) % n);
  }
  return s;
}

}  // namespace mcae
