#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcae/error.hpp"

namespace mcae {

struct PixelPos {
  int x = 0;
  int y = 0;
  bool operator==(const PixelPos&) const = default;
};

/// Row-major fixed-size raster. The tag keeps gray images, binary images and
/// distance fields from being mixed up.
template <typename T, typename Tag>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw InvalidArgument("raster dimensions must be >= 0");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }
  Raster(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0 ||
        data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
      throw InvalidArgument("raster data length " + std::to_string(data_.size()) +
                            " != width*height " + std::to_string(width) + "*" +
                            std::to_string(height));
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& at(int x, int y) { return data_[index(x, y)]; }
  const T& at(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  const std::vector<T>& data() const noexcept { return data_; }
  std::vector<T>& data() noexcept { return data_; }

  bool same_size(int w, int h) const noexcept { return width_ == w && height_ == h; }
  template <typename U, typename V>
  bool same_size(const Raster<U, V>& o) const noexcept {
    return width_ == o.width() && height_ == o.height();
  }

  bool operator==(const Raster&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

struct GrayTag {};
struct BinaryTag {};
struct DistanceTag {};

/// Intensities in [0,1].
using GrayImage = Raster<double, GrayTag>;
/// 1 = foreground.
using BinaryImage = Raster<std::uint8_t, BinaryTag>;
/// Signed distances in pixels: negative inside the foreground.
using DistanceField = Raster<double, DistanceTag>;

inline std::size_t foreground_count(const BinaryImage& b) {
  std::size_t n = 0;
  for (auto v : b.data()) n += v != 0;
  return n;
}

/// Foreground pixel with a background 4-neighbour or lying on the canvas edge.
inline bool is_boundary_pixel(const BinaryImage& b, int x, int y) {
  if (!b.contains(x, y) || !b.at(x, y)) return false;
  constexpr int dx[4] = {0, 1, 0, -1};
  constexpr int dy[4] = {-1, 0, 1, 0};
  for (int d = 0; d < 4; ++d) {
    const int nx = x + dx[d], ny = y + dy[d];
    if (!b.contains(nx, ny) || !b.at(nx, ny)) return true;
  }
  return false;
}

inline BinaryImage boundary_mask(const BinaryImage& b) {
  BinaryImage out(b.width(), b.height(), 0);
  for (int y = 0; y < b.height(); ++y)
    for (int x = 0; x < b.width(); ++x) out.at(x, y) = is_boundary_pixel(b, x, y) ? 1 : 0;
  return out;
}

/// Boundary pixels in raster (y, x) order.
inline std::vector<PixelPos> boundary_pixels(const BinaryImage& b) {
  std::vector<PixelPos> out;
  for (int y = 0; y < b.height(); ++y)
    for (int x = 0; x < b.width(); ++x)
      if (is_boundary_pixel(b, x, y)) out.push_back({x, y});
  return out;
}

inline GrayImage to_gray(const BinaryImage& b) {
  GrayImage g(b.width(), b.height(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) g[i] = b[i] ? 1.0 : 0.0;
  return g;
}

/// Foreground iff intensity >= threshold.
inline BinaryImage threshold(const GrayImage& g, double t = 0.5) {
  BinaryImage b(g.width(), g.height(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) b[i] = g[i] >= t ? 1 : 0;
  return b;
}

/// Mean intensity of each block x block tile, row-major over tiles. Width and
/// height must be multiples of block.
inline std::vector<double> block_means(const GrayImage& g, int block) {
  if (block < 1 || g.width() % block != 0 || g.height() % block != 0)
    throw InvalidArgument("block_means: image size not a multiple of block");
  const int bw = g.width() / block, bh = g.height() / block;
  std::vector<double> out(static_cast<std::size_t>(bw) * static_cast<std::size_t>(bh), 0.0);
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x)
      out[static_cast<std::size_t>((y / block) * bw + x / block)] += g.at(x, y);
  for (auto& v : out) v /= static_cast<double>(block * block);
  return out;
}

inline std::vector<double> block_means(const BinaryImage& b, int block) {
  return block_means(to_gray(b), block);
}

}  // namespace mcae
