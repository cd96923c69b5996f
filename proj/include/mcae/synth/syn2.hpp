#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "mcae/synth/control_points.hpp"

namespace mcae {

struct Syn2Draw {
  std::size_t first = 0;   // index into the class's Syn I list
  std::size_t second = 0;
  BlendMode mode = BlendMode::Interpolate;
  double weight = 0.0;
};

struct Syn2Item {
  std::string label;
  Syn2Draw draw;
  ControlPointSet points;
  BinaryImage image;
};

struct Syn2Result {
  std::vector<Syn2Item> items;
  std::vector<std::string> warnings;
};

/// For every class with at least two Syn I sets, per_class draws of a
/// distinct pair, a mode (interpolate/extrapolate with probability 1/2) and a
/// weight uniform in [0, 1]. Classes are visited in sorted label order, Syn I
/// sets in input order. Classes with fewer than two sets are skipped with a
/// warning.
inline Syn2Result generate_syn2(const std::vector<std::pair<std::string, ControlPointSet>>& corpus,
                                int per_class, std::uint64_t seed, int width, int height) {
  if (per_class < 0) throw InvalidArgument("generate_syn2: per_class must be >= 0");
  std::map<std::string, std::vector<const ControlPointSet*>> by_class;
  for (const auto& [label, s] : corpus) by_class[label].push_back(&s);

  Syn2Result res;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  for (const auto& [label, sets] : by_class) {
    if (sets.size() < 2) {
      res.warnings.push_back("class '" + label + "' has " + std::to_string(sets.size()) +
                             " Syn I set(s); need 2, skipped");
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick_a(0, sets.size() - 1), pick_b(0, sets.size() - 2);
    for (int i = 0; i < per_class; ++i) {
      Syn2Draw d;
      d.first = pick_a(rng);
      d.second = pick_b(rng);
      if (d.second >= d.first) ++d.second;
      d.mode = coin(rng) ? BlendMode::Extrapolate : BlendMode::Interpolate;
      d.weight = unit(rng);
      Syn2Item item{label, d, {}, {}};
      item.points = interpolate_cp(*sets[d.first], *sets[d.second], d.weight, d.mode, width, height);
      item.image = render(item.points, width, height);
      res.items.push_back(std::move(item));
    }
  }
  return res;
}

}  // namespace mcae
