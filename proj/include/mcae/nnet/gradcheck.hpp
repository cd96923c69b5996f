#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "mcae/nnet/autoencoder.hpp"

namespace mcae {

/// Central differences (f(p + s e_i) - f(p - s e_i)) / 2s for every coordinate.
inline Vector finite_diff_gradient(const std::function<double(const Vector&)>& loss,
                                   const Vector& params, double step) {
  if (!(step > 0.0)) throw InvalidArgument("finite_diff_gradient: step must be > 0");
  Vector g(params.size());
  Vector p = params;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double orig = p[i];
    p[i] = orig + step;
    const double up = loss(p);
    p[i] = orig - step;
    const double down = loss(p);
    p[i] = orig;
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

/// Finite-difference gradient of a model-level loss, shaped like the model.
inline GradientBundle finite_diff_gradient(const std::function<double(const McaeModel&)>& loss,
                                           const McaeModel& model, double step) {
  McaeModel scratch = model;
  auto flat_loss = [&](const Vector& theta) {
    unflatten(theta, scratch);
    return loss(scratch);
  };
  return unflatten_gradient(finite_diff_gradient(flat_loss, flatten(model), step), model);
}

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor). The floor keeps coordinates
/// whose true gradient is ~0 from dominating through roundoff.
inline double max_relative_error(const Vector& a, const Vector& b, double floor = 1e-4) {
  if (a.size() != b.size()) throw InvalidArgument("max_relative_error: length mismatch");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  Eigen::Index parameters = 0;
};

/// Compares mcae_gradients with central differences of mcae_loss.E.
inline GradCheckReport check_mcae_gradients(const McaeModel& model, const ChannelTask& left,
                                            const ChannelTask& right, double step = 1e-5) {
  const Vector analytic = flatten(mcae_gradients(model, left, right));
  const Vector numeric = flatten(finite_diff_gradient(
      [&](const McaeModel& m) { return mcae_loss(m, left, right).E; }, model, step));
  GradCheckReport r;
  r.max_rel_error = max_relative_error(analytic, numeric);
  r.max_abs_error = (analytic - numeric).cwiseAbs().maxCoeff();
  r.parameters = analytic.size();
  return r;
}

}  // namespace mcae
