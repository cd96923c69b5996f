#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <tuple>

#include "mcae/error.hpp"

namespace mcae {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline std::string shape_str(Eigen::Index rows, Eigen::Index cols) {
  std::ostringstream os;
  os << rows << "x" << cols;
  return os.str();
}

template <typename Derived>
std::string shape_of(const Eigen::DenseBase<Derived>& m) {
  return shape_str(m.rows(), m.cols());
}

/// Exact equality including shape; safe on mismatched sizes.
template <typename A, typename B>
bool same_values(const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || (a.derived().array() == b.derived().array()).all());
}

// Encoder: h = sigmoid(W x + b), W is k x m.
struct EncoderParams {
  Matrix W;
  Vector b;

  Eigen::Index inputs() const { return W.cols(); }
  Eigen::Index hidden() const { return W.rows(); }
  friend bool operator==(const EncoderParams& a, const EncoderParams& b) {
    return same_values(a.W, b.W) && same_values(a.b, b.b);
  }
};

// Decoder: y = sigmoid(W h + b), W is m x k.
struct DecoderParams {
  Matrix W;
  Vector b;

  Eigen::Index outputs() const { return W.rows(); }
  Eigen::Index hidden() const { return W.cols(); }
  friend bool operator==(const DecoderParams& a, const DecoderParams& b) {
    return same_values(a.W, b.W) && same_values(a.b, b.b);
  }
};

struct Hyper {
  double lambda = 1e-4;  // weight decay
  double rho = 0.1;      // sparsity weight
  double delta = 0.05;   // target mean activation
  double gamma = 1.0;    // balance weight
  /// Count the shared encoder's decay term inside each channel objective
  /// (twice in E). When false it is added to E once.
  bool encoder_decay_per_channel = true;

  void validate() const {
    if (!(delta > 0.0 && delta < 1.0))
      throw InvalidArgument("hyper.delta must lie strictly inside (0,1)");
    if (!(lambda >= 0.0) || !(rho >= 0.0) || !(gamma >= 0.0))
      throw InvalidArgument("hyper.lambda, hyper.rho and hyper.gamma must be >= 0");
  }
  bool operator==(const Hyper&) const = default;
};

struct McaeModel {
  EncoderParams encoder;
  DecoderParams decoder_left;
  DecoderParams decoder_right;
  Hyper hyper;

  Eigen::Index inputs() const { return encoder.inputs(); }
  Eigen::Index hidden() const { return encoder.hidden(); }

  void validate() const {
    const auto m = encoder.W.cols(), k = encoder.W.rows();
    if (m < 1 || k < 1) throw InvalidArgument("model needs m >= 1 and k >= 1");
    if (encoder.b.size() != k)
      throw InvalidArgument("encoder bias length " + std::to_string(encoder.b.size()) +
                            " != k " + std::to_string(k));
    for (const auto* d : {&decoder_left, &decoder_right}) {
      if (d->W.rows() != m || d->W.cols() != k || d->b.size() != m)
        throw InvalidArgument("decoder shape " + shape_of(d->W) + " incompatible with encoder " +
                              shape_of(encoder.W));
    }
    auto finite = [](const auto& x) { return x.allFinite(); };
    if (!finite(encoder.W) || !finite(encoder.b) || !finite(decoder_left.W) ||
        !finite(decoder_left.b) || !finite(decoder_right.W) || !finite(decoder_right.b))
      throw InvalidArgument("model has non-finite parameters");
    hyper.validate();
  }
  bool operator==(const McaeModel&) const = default;
};

/// Paired (input, reconstruction target) rows for one channel: <i:X, t:Y>.
struct ChannelTask {
  Matrix inputs;
  Matrix targets;

  Eigen::Index size() const { return inputs.rows(); }
  bool empty() const { return inputs.rows() == 0; }

  void validate() const {
    if (inputs.rows() != targets.rows() || inputs.cols() != targets.cols())
      throw InvalidArgument("channel task inputs " + shape_of(inputs) + " vs targets " +
                            shape_of(targets));
    if (inputs.size() > 0 && (inputs.minCoeff() < 0.0 || inputs.maxCoeff() > 1.0))
      throw InvalidArgument("channel task inputs must lie in [0,1]");
    if (targets.size() > 0 && (targets.minCoeff() < 0.0 || targets.maxCoeff() > 1.0))
      throw InvalidArgument("channel task targets must lie in [0,1]");
  }
};

struct GradientBundle {
  Matrix d_W_e;
  Vector d_b_e;
  Matrix d_W_d_left;
  Vector d_b_d_left;
  Matrix d_W_d_right;
  Vector d_b_d_right;

  static GradientBundle zeros_like(const McaeModel& m) {
    return {Matrix::Zero(m.encoder.W.rows(), m.encoder.W.cols()),
            Vector::Zero(m.encoder.b.size()),
            Matrix::Zero(m.decoder_left.W.rows(), m.decoder_left.W.cols()),
            Vector::Zero(m.decoder_left.b.size()),
            Matrix::Zero(m.decoder_right.W.rows(), m.decoder_right.W.cols()),
            Vector::Zero(m.decoder_right.b.size())};
  }
};

/// Total number of scalar parameters, the length of the flat vector used by
/// the optimizer.
inline Eigen::Index parameter_count(Eigen::Index m, Eigen::Index k) {
  return k * m + k + 2 * (m * k + m);
}

// Flat layout: W_e (column-major), b_e, W_d_left, b_d_left, W_d_right, b_d_right.
inline Vector flatten(const McaeModel& model) {
  const auto m = model.inputs(), k = model.hidden();
  Vector theta(parameter_count(m, k));
  Eigen::Index at = 0;
  auto put = [&](const auto& x) {
    theta.segment(at, x.size()) = Eigen::Map<const Vector>(x.data(), x.size());
    at += x.size();
  };
  put(model.encoder.W);
  put(model.encoder.b);
  put(model.decoder_left.W);
  put(model.decoder_left.b);
  put(model.decoder_right.W);
  put(model.decoder_right.b);
  return theta;
}

inline Vector flatten(const GradientBundle& g) {
  Vector theta(g.d_W_e.size() + g.d_b_e.size() + g.d_W_d_left.size() + g.d_b_d_left.size() +
               g.d_W_d_right.size() + g.d_b_d_right.size());
  Eigen::Index at = 0;
  auto put = [&](const auto& x) {
    theta.segment(at, x.size()) = Eigen::Map<const Vector>(x.data(), x.size());
    at += x.size();
  };
  put(g.d_W_e);
  put(g.d_b_e);
  put(g.d_W_d_left);
  put(g.d_b_d_left);
  put(g.d_W_d_right);
  put(g.d_b_d_right);
  return theta;
}

/// Writes a flat vector back into a model of the same shape.
inline void unflatten(const Vector& theta, McaeModel& model) {
  const auto m = model.inputs(), k = model.hidden();
  if (theta.size() != parameter_count(m, k))
    throw InvalidArgument("flat parameter vector has wrong length");
  Eigen::Index at = 0;
  auto get = [&](auto& x) {
    Eigen::Map<Vector>(x.data(), x.size()) = theta.segment(at, x.size());
    at += x.size();
  };
  get(model.encoder.W);
  get(model.encoder.b);
  get(model.decoder_left.W);
  get(model.decoder_left.b);
  get(model.decoder_right.W);
  get(model.decoder_right.b);
}

inline GradientBundle unflatten_gradient(const Vector& theta, const McaeModel& like) {
  auto g = GradientBundle::zeros_like(like);
  Eigen::Index at = 0;
  auto get = [&](auto& x) {
    Eigen::Map<Vector>(x.data(), x.size()) = theta.segment(at, x.size());
    at += x.size();
  };
  get(g.d_W_e);
  get(g.d_b_e);
  get(g.d_W_d_left);
  get(g.d_b_d_left);
  get(g.d_W_d_right);
  get(g.d_b_d_right);
  return g;
}

/// Uniform weights in [-r, r], r = sqrt(6 / (m + k)); zero biases.
/// Draws W_e, then W_d_left, then W_d_right, each in column-major order.
inline std::tuple<EncoderParams, DecoderParams, DecoderParams> init_params(int m, int k,
                                                                          std::uint64_t seed) {
  if (m < 1 || k < 1) throw InvalidArgument("init_params needs m >= 1 and k >= 1");
  const double r = std::sqrt(6.0 / static_cast<double>(m + k));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-r, r);
  auto fill = [&](Matrix& w) {
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  };
  EncoderParams enc{Matrix(k, m), Vector::Zero(k)};
  DecoderParams left{Matrix(m, k), Vector::Zero(m)};
  DecoderParams right{Matrix(m, k), Vector::Zero(m)};
  fill(enc.W);
  fill(left.W);
  fill(right.W);
  return {std::move(enc), std::move(left), std::move(right)};
}

inline McaeModel make_model(int m, int k, const Hyper& hyper, std::uint64_t seed) {
  auto [enc, left, right] = init_params(m, k, seed);
  McaeModel model{std::move(enc), std::move(left), std::move(right), hyper};
  model.validate();
  return model;
}

}  // namespace mcae
