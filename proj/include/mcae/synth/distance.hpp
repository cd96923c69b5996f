#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "mcae/synth/image.hpp"

namespace mcae {

namespace detail {

// Exact 1-D squared distance transform of a sampled function (lower envelope
// of parabolas). f holds 0 at sites and +inf elsewhere on the first pass.
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                   std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    while (k >= 0) {
      const int p = v[k];
      const double s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -inf : ((f[q] + double(q) * q) - (f[v[k - 1]] + double(v[k - 1]) * v[k - 1])) /
                                (2.0 * (q - v[k - 1]));
    z[k + 1] = inf;
  }
  if (k < 0) {
    for (int q = 0; q < n; ++q) d[q] = inf;
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}

}  // namespace detail

/// Squared Euclidean distance from every pixel to the nearest pixel where
/// sites is set (0 on sites, +inf everywhere if there are none). Separable
/// exact transform; values are integers stored in doubles.
inline std::vector<double> squared_distance_to(const BinaryImage& sites) {
  const int w = sites.width(), h = sites.height();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> grid(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) grid[i] = sites[i] ? 0.0 : inf;

  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  // Columns.
  f.resize(h), d.resize(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = grid[static_cast<std::size_t>(y) * w + x];
    detail::edt_1d(f, d, v, z);
    for (int y = 0; y < h; ++y) grid[static_cast<std::size_t>(y) * w + x] = d[y];
  }
  // Rows.
  f.resize(w), d.resize(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = grid[static_cast<std::size_t>(y) * w + x];
    detail::edt_1d(f, d, v, z);
    for (int x = 0; x < w; ++x) grid[static_cast<std::size_t>(y) * w + x] = d[x];
  }
  return grid;
}

/// Unsigned distance from each pixel to the nearest foreground pixel.
inline DistanceField unsigned_distance(const BinaryImage& b) {
  auto sq = squared_distance_to(b);
  for (auto& v : sq) v = std::sqrt(v);
  return DistanceField(b.width(), b.height(), std::move(sq));
}

/// Signed Euclidean distance transform: +distance to the nearest foreground
/// pixel outside the shape, -distance to the nearest background pixel inside.
/// Degenerate inputs: an all-foreground image maps to 0 everywhere; an empty
/// image maps to +(width + height) everywhere. Both binarize back to the input.
inline DistanceField distance_transform(const BinaryImage& b) {
  const std::size_t fg = foreground_count(b);
  if (fg == b.size()) return DistanceField(b.width(), b.height(), 0.0);
  if (fg == 0) return DistanceField(b.width(), b.height(), double(b.width() + b.height()));

  BinaryImage inverse(b.width(), b.height(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) inverse[i] = b[i] ? 0 : 1;
  const auto outside = squared_distance_to(b);
  const auto inside = squared_distance_to(inverse);
  DistanceField out(b.width(), b.height(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i)
    out[i] = b[i] ? -std::sqrt(inside[i]) : std::sqrt(outside[i]);
  return out;
}

/// Foreground iff value <= 0.
inline BinaryImage binarize(const DistanceField& f) {
  BinaryImage b(f.width(), f.height(), 0);
  for (std::size_t i = 0; i < f.size(); ++i) b[i] = f[i] <= 0.0 ? 1 : 0;
  return b;
}

/// (1 - t) a + t b, pixelwise.
inline DistanceField blend(const DistanceField& a, const DistanceField& b, double t) {
  if (!a.same_size(b)) throw InvalidArgument("blend: field sizes differ");
  DistanceField out(a.width(), a.height(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - t) * a[i] + t * b[i];
  return out;
}

/// Mean over the foreground of `from` of the distance field `to_dt`.
inline double directed_chamfer(const BinaryImage& from, const DistanceField& to_dt) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < from.size(); ++i)
    if (from[i]) sum += to_dt[i], ++n;
  return sum / static_cast<double>(n);
}

/// Symmetric mean chamfer distance between two same-size images, each with
/// at least one foreground pixel.
inline double image_distance(const BinaryImage& u, const BinaryImage& v) {
  if (!u.same_size(v)) throw InvalidArgument("image_distance: image sizes differ");
  if (foreground_count(u) == 0 || foreground_count(v) == 0)
    throw InvalidArgument("image_distance: undefined for an empty image");
  return 0.5 * (directed_chamfer(u, unsigned_distance(v)) + directed_chamfer(v, unsigned_distance(u)));
}

}  // namespace mcae
