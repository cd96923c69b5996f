#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "mcae/data/labeled.hpp"
#include "mcae/synth/congeal.hpp"
#include "mcae/synth/matching.hpp"

namespace mcae {

inline constexpr int kDigitCanvas = 32;
inline constexpr int kDigitBlock = 4;

/// 32x32 bitmap whose 4x4 blocks hold exactly round(16 * feature) on-pixels,
/// placed where a bilinear upsampling of the 8x8 grid is brightest (raster
/// order on ties). block_means of the result returns the input exactly for
/// features that are multiples of 1/16.
inline BinaryImage upsample_digit(const Eigen::Ref<const Vector>& features) {
  if (features.size() != 64) throw InvalidArgument("upsample_digit: expected 64 features");
  GrayImage grid(8, 8, 0.0);
  for (int i = 0; i < 64; ++i) grid[static_cast<std::size_t>(i)] = features(i);
  auto coarse = [&](int x, int y) { return grid.at(std::clamp(x, 0, 7), std::clamp(y, 0, 7)); };

  BinaryImage out(kDigitCanvas, kDigitCanvas, 0);
  std::array<std::pair<double, int>, 16> ranked;
  for (int by = 0; by < 8; ++by)
    for (int bx = 0; bx < 8; ++bx) {
      const int count = static_cast<int>(std::lround(grid.at(bx, by) * 16.0));
      for (int k = 0; k < 16; ++k) {
        const int x = bx * 4 + k % 4, y = by * 4 + k / 4;
        // Block centres sit at 4i + 1.5.
        const double gx = (x - 1.5) / 4.0, gy = (y - 1.5) / 4.0;
        const int x0 = static_cast<int>(std::floor(gx)), y0 = static_cast<int>(std::floor(gy));
        const double fx = gx - x0, fy = gy - y0;
        const double v = (1 - fx) * (1 - fy) * coarse(x0, y0) + fx * (1 - fy) * coarse(x0 + 1, y0) +
                         (1 - fx) * fy * coarse(x0, y0 + 1) + fx * fy * coarse(x0 + 1, y0 + 1);
        ranked[static_cast<std::size_t>(k)] = {-v, k};
      }
      std::sort(ranked.begin(), ranked.end());
      for (int r = 0; r < count; ++r) {
        const int k = ranked[static_cast<std::size_t>(r)].second;
        out.at(bx * 4 + k % 4, by * 4 + k / 4) = 1;
      }
    }
  return out;
}

inline Vector digit_features(const BinaryImage& img) {
  const auto m = block_means(img, kDigitBlock);
  return Eigen::Map<const Vector>(m.data(), static_cast<Eigen::Index>(m.size()));
}

inline std::vector<BinaryImage> upsample_all(const LabeledFeatures& data) {
  std::vector<BinaryImage> out;
  out.reserve(static_cast<std::size_t>(data.size()));
  for (Eigen::Index i = 0; i < data.size(); ++i) out.push_back(upsample_digit(data.features.row(i).transpose()));
  return out;
}

struct DigitPrototypeOptions {
  int per_class = 20;  // images congealed per class (first ones in file order)
  int points = 24;
  CongealOptions congeal{};
};

struct DigitPrototype {
  PrototypeSpec spec;
  GrayImage mean;  // congealed mean image
};

/// Congeals the first per_class images of each class and samples boundary
/// control points from the aligned mean.
inline std::vector<DigitPrototype> build_digit_prototypes(const LabeledFeatures& data,
                                                          const DigitPrototypeOptions& opts = {}) {
  data.validate();
  std::vector<DigitPrototype> out;
  for (int c = 0; c < data.num_classes(); ++c) {
    std::vector<BinaryImage> imgs;
    for (Eigen::Index i = 0; i < data.size() && static_cast<int>(imgs.size()) < opts.per_class; ++i)
      if (data.labels[static_cast<std::size_t>(i)] == c) imgs.push_back(upsample_digit(data.features.row(i).transpose()));
    if (imgs.size() < 2)
      throw InvalidArgument("class " + data.class_names[static_cast<std::size_t>(c)] +
                            " has fewer than 2 images to congeal");
    const auto res = congeal(imgs, opts.congeal);
    DigitPrototype p{{data.class_names[static_cast<std::size_t>(c)], kDigitCanvas, kDigitCanvas,
                      sample_boundary_points(res.prototype, opts.points)},
                     res.prototype};
    out.push_back(std::move(p));
  }
  return out;
}

struct Syn1Set {
  std::vector<ControlPointSet> points;  // one per real instance
  LabeledFeatures features;             // block features of render(points)
};

/// Syn I for each real instance: the class prototype's points migrated from
/// render(prototype) onto the real bitmap.
inline Syn1Set make_digit_syn1(const LabeledFeatures& real, const std::vector<DigitPrototype>& protos,
                               int steps = 10) {
  real.validate();
  Syn1Set out;
  out.features = {Matrix(real.size(), 64), real.labels, real.class_names};
  std::vector<BinaryImage> proto_imgs;
  for (const auto& p : protos) proto_imgs.push_back(render(p.spec));
  for (Eigen::Index i = 0; i < real.size(); ++i) {
    const auto c = static_cast<std::size_t>(real.labels[static_cast<std::size_t>(i)]);
    const auto u = upsample_digit(real.features.row(i).transpose());
    auto res = migrate_control_points(u, proto_imgs[c], protos[c].spec.initial, steps);
    out.features.features.row(i) = digit_features(render(res.points, kDigitCanvas, kDigitCanvas)).transpose();
    out.points.push_back(std::move(res.points));
  }
  return out;
}

}  // namespace mcae
