#pragma once

#include <random>

#include "mcae/nnet/params.hpp"

namespace mcae::testing {

inline Matrix random_unit(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix x(rows, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  return x;
}

inline Matrix random_normal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                            double sd = 1.0) {
  std::normal_distribution<double> nd(0.0, sd);
  Matrix x(rows, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = nd(rng);
  return x;
}

inline McaeModel random_model(int m, int k, const Hyper& h, std::mt19937_64& rng,
                              double sd = 1.0) {
  return McaeModel{{random_normal(k, m, rng, sd), random_normal(k, 1, rng, sd)},
                   {random_normal(m, k, rng, sd), random_normal(m, 1, rng, sd)},
                   {random_normal(m, k, rng, sd), random_normal(m, 1, rng, sd)},
                   h};
}

struct GradInstance {
  McaeModel model;
  ChannelTask left;
  ChannelTask right;
};

// Random MCAE instance with m <= 6, k <= 5, n <= 8 and every regularizer on.
// Weights are N(0, 0.5^2) and lambda <= 0.1 so E stays O(1); with much larger
// E the central-difference oracle's roundoff (eps |E| / step) exceeds the
// tolerance on small gradient coordinates.
inline GradInstance random_grad_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> md(1, 6), kd(1, 5), nd(1, 8);
  std::uniform_real_distribution<double> unit(0.01, 1.0), del(0.05, 0.3);
  const int m = md(rng), k = kd(rng), nl = nd(rng), nr = nd(rng);
  Hyper h{0.001 + 0.099 * unit(rng), unit(rng), del(rng), unit(rng)};
  auto model = random_model(m, k, h, rng, 0.5);
  ChannelTask left{random_unit(nl, m, rng), random_unit(nl, m, rng)};
  ChannelTask right{random_unit(nr, m, rng), random_unit(nr, m, rng)};
  return {std::move(model), std::move(left), std::move(right)};
}

}  // namespace mcae::testing
