#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcae/data/digits.hpp"
#include "mcae/io/optdigits.hpp"
#include "mcae/synth/roof.hpp"
#include "mcae/synth/syn2.hpp"

namespace mcae {

/// Everything one experiment draws from. Row i of syn1 is the Syn I match of
/// row i of real.
struct ExperimentData {
  LabeledFeatures real;  // training split
  LabeledFeatures syn1;
  LabeledFeatures syn2;
  LabeledFeatures test;  // held-out real
  std::vector<ControlPointSet> syn1_points;
  std::vector<Syn2Item> syn2_items;
  std::vector<std::string> warnings;
};

struct DigitDataOptions {
  std::string train_path;
  std::string test_path;  // empty: the rows of train_path after train_count
  int train_count = 1000;  // <= 0 keeps every training row
  DigitPrototypeOptions prototypes{};
  int syn2_per_class = 100;
  std::uint64_t seed = 1;
};

namespace detail {

inline LabeledFeatures syn2_features(const Syn2Result& s2, const std::vector<std::string>& names) {
  LabeledFeatures out{Matrix(static_cast<Eigen::Index>(s2.items.size()), 64), {}, names};
  for (std::size_t i = 0; i < s2.items.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = digit_features(s2.items[i].image).transpose();
    const auto it = std::find(names.begin(), names.end(), s2.items[i].label);
    out.labels.push_back(static_cast<int>(it - names.begin()));
  }
  return out;
}

inline Syn2Result make_syn2(const std::vector<ControlPointSet>& points, const LabeledFeatures& labels,
                            int per_class, std::uint64_t seed, int canvas) {
  std::vector<std::pair<std::string, ControlPointSet>> corpus;
  for (std::size_t i = 0; i < points.size(); ++i)
    corpus.emplace_back(labels.class_names[static_cast<std::size_t>(labels.labels[i])], points[i]);
  return generate_syn2(corpus, per_class, seed, canvas, canvas);
}

}  // namespace detail

inline ExperimentData build_digit_data(const DigitDataOptions& opts) {
  ExperimentData d;
  auto train = io::load_optdigits(opts.train_path);
  if (opts.test_path.empty()) {
    if (opts.train_count <= 0 || opts.train_count >= train.size())
      throw InvalidArgument("digits: with no test file, train_count must leave rows for testing");
    d.test = train.slice(opts.train_count, train.size());
    d.real = train.slice(0, opts.train_count);
  } else {
    d.test = io::load_optdigits(opts.test_path);
    d.real = opts.train_count > 0 && opts.train_count < train.size() ? train.slice(0, opts.train_count)
                                                                     : std::move(train);
  }
  const auto protos = build_digit_prototypes(d.real, opts.prototypes);
  auto syn1 = make_digit_syn1(d.real, protos);
  d.syn1 = std::move(syn1.features);
  d.syn1_points = std::move(syn1.points);
  auto s2 = detail::make_syn2(d.syn1_points, d.real, opts.syn2_per_class, opts.seed, kDigitCanvas);
  d.syn2 = detail::syn2_features(s2, d.real.class_names);
  d.syn2_items = std::move(s2.items);
  d.warnings = std::move(s2.warnings);
  return d;
}

struct RoofDataOptions {
  std::vector<std::string> styles = roof_styles();
  int train_per_style = 100;
  int test_per_style = 100;
  double jitter = 2.0;
  int clutter = 0;
  int syn2_per_class = 100;
  std::uint64_t seed = 1;
};

/// Roof images are 32x32 like the digits, so they share the 4x4 block features.
inline ExperimentData build_roof_data(const RoofDataOptions& opts) {
  std::vector<PrototypeSpec> specs;
  for (const auto& s : opts.styles) specs.push_back(roof_prototype(s));
  ExperimentData d;
  auto to_features = [&](const std::vector<RoofItem>& items, bool matched) {
    LabeledFeatures f{Matrix(static_cast<Eigen::Index>(items.size()), 64), {}, opts.styles};
    for (std::size_t i = 0; i < items.size(); ++i) {
      f.features.row(static_cast<Eigen::Index>(i)) =
          digit_features(matched ? items[i].match.image : items[i].real).transpose();
      const auto it = std::find(opts.styles.begin(), opts.styles.end(), items[i].label);
      f.labels.push_back(static_cast<int>(it - opts.styles.begin()));
    }
    return f;
  };
  const auto train = make_toy_roof_corpus(specs, opts.train_per_style, opts.jitter, opts.seed, opts.clutter);
  const auto test = make_toy_roof_corpus(specs, opts.test_per_style, opts.jitter, opts.seed + 1, opts.clutter);
  d.real = to_features(train, false);
  d.syn1 = to_features(train, true);
  d.test = to_features(test, false);
  for (const auto& item : train) d.syn1_points.push_back(item.match.points);
  auto s2 = detail::make_syn2(d.syn1_points, d.real, opts.syn2_per_class, opts.seed, kRoofCanvas);
  d.syn2 = detail::syn2_features(s2, opts.styles);
  d.syn2_items = std::move(s2.items);
  d.warnings = std::move(s2.warnings);
  return d;
}

}  // namespace mcae
