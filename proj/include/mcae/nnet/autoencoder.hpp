#pragma once

#include <cmath>
#include <optional>

#include "mcae/nnet/params.hpp"

namespace mcae {

/// Logistic function, branch-on-sign so exp never overflows.
inline double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

template <typename Derived>
Matrix sigmoid(const Eigen::MatrixBase<Derived>& z) {
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

/// Row i of the result is sigmoid(W x_i + b).
inline Matrix encode(const EncoderParams& p, const Matrix& X) {
  if (X.cols() != p.W.cols() || p.b.size() != p.W.rows())
    throw InvalidArgument("encode: input " + shape_of(X) + " incompatible with W_e " +
                          shape_of(p.W));
  Matrix z = X * p.W.transpose();
  z.rowwise() += p.b.transpose();
  return sigmoid(z);
}

inline Matrix decode(const DecoderParams& p, const Matrix& H) {
  if (H.cols() != p.W.cols() || p.b.size() != p.W.rows())
    throw InvalidArgument("decode: hidden " + shape_of(H) + " incompatible with W_d " +
                          shape_of(p.W));
  Matrix z = H * p.W.transpose();
  z.rowwise() += p.b.transpose();
  return sigmoid(z);
}

/// Sum over hidden units of KL(delta || rho_hat_j) between Bernoulli
/// distributions. Every rho_hat_j must lie strictly inside (0,1).
inline double kl_sparsity(double delta, const Vector& rho_hat) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("kl_sparsity: delta outside (0,1)");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < rho_hat.size(); ++j) {
    const double r = rho_hat[j];
    if (!(r > 0.0 && r < 1.0))
      throw DomainError("kl_sparsity: mean activation of hidden unit " + std::to_string(j) +
                        " is " + std::to_string(r) + ", outside (0,1)");
    sum += delta * std::log(delta / r) + (1.0 - delta) * std::log((1.0 - delta) / (1.0 - r));
  }
  return sum;
}

struct SaeLoss {
  double J = 0.0;
  Vector rho_hat;  // mean activation of each hidden unit over the task rows
  double reconstruction = 0.0;
  double decay = 0.0;
  double sparsity = 0.0;  // Theta, before multiplying by rho
};

namespace detail {

inline void check_task(const EncoderParams& enc, const DecoderParams& dec, const ChannelTask& task,
                       const char* who) {
  if (task.inputs.rows() != task.targets.rows() || task.inputs.cols() != task.targets.cols())
    throw InvalidArgument(std::string(who) + ": task inputs " + shape_of(task.inputs) +
                          " vs targets " + shape_of(task.targets));
  if (task.empty()) throw InvalidArgument(std::string(who) + ": empty task (n = 0)");
  if (task.inputs.cols() != enc.W.cols())
    throw InvalidArgument(std::string(who) + ": task " + shape_of(task.inputs) +
                          " incompatible with W_e " + shape_of(enc.W));
  if (dec.W.rows() != task.targets.cols() || dec.W.cols() != enc.W.rows())
    throw InvalidArgument(std::string(who) + ": W_d " + shape_of(dec.W) +
                          " incompatible with W_e " + shape_of(enc.W));
}

struct ChannelEval {
  SaeLoss loss;
  // Filled only when gradients are requested.
  Matrix d_W_e;
  Vector d_b_e;
  Matrix d_W_d;
  Vector d_b_d;
};

// One channel objective J = (1/n) sum ||y_i - t_i||^2 + lambda/2 (|W_e|^2 +
// |W_d|^2) + rho * Theta, with the W_e part of the decay optional.
inline ChannelEval channel_eval(const EncoderParams& enc, const DecoderParams& dec,
                                const ChannelTask& task, const Hyper& h, bool encoder_decay,
                                bool want_grad) {
  const double n = static_cast<double>(task.size());
  const Matrix H = encode(enc, task.inputs);
  const Matrix Y = decode(dec, H);
  const Matrix R = Y - task.targets;

  ChannelEval out;
  out.loss.reconstruction = R.squaredNorm() / n;
  out.loss.decay = 0.5 * dec.W.squaredNorm();
  if (encoder_decay) out.loss.decay += 0.5 * enc.W.squaredNorm();
  out.loss.rho_hat = H.colwise().mean().transpose();
  if (h.rho > 0.0) out.loss.sparsity = kl_sparsity(h.delta, out.loss.rho_hat);
  out.loss.J = out.loss.reconstruction + h.lambda * out.loss.decay + h.rho * out.loss.sparsity;
  if (!want_grad) return out;

  // Output layer.
  const Matrix delta_out = ((2.0 / n) * R).cwiseProduct(Y.cwiseProduct((1.0 - Y.array()).matrix()));
  out.d_W_d = delta_out.transpose() * H + h.lambda * dec.W;
  out.d_b_d = delta_out.colwise().sum().transpose();

  // Hidden layer, including the KL term through rho_hat_j = mean_i H_ij.
  Matrix dH = delta_out * dec.W;
  if (h.rho > 0.0) {
    const Vector& r = out.loss.rho_hat;
    const Eigen::RowVectorXd kl_grad =
        ((h.rho / n) * (-h.delta / r.array() + (1.0 - h.delta) / (1.0 - r.array()))).matrix().transpose();
    dH.rowwise() += kl_grad;
  }
  const Matrix delta_hid = dH.cwiseProduct(H.cwiseProduct((1.0 - H.array()).matrix()));
  out.d_W_e = delta_hid.transpose() * task.inputs;
  if (encoder_decay) out.d_W_e += h.lambda * enc.W;
  out.d_b_e = delta_hid.colwise().sum().transpose();
  return out;
}

}  // namespace detail

/// Sparse autoencoder objective for one encoder/decoder pair.
inline SaeLoss sae_loss(const EncoderParams& enc, const DecoderParams& dec, const ChannelTask& task,
                        const Hyper& h) {
  h.validate();
  detail::check_task(enc, dec, task, "sae_loss");
  return detail::channel_eval(enc, dec, task, h, true, false).loss;
}

struct McaeLoss {
  double E = 0.0;
  double J_left = 0.0;
  double J_right = 0.0;
  double balance() const { return 0.5 * (J_left - J_right) * (J_left - J_right); }
};

struct McaeEvaluation {
  McaeLoss loss;
  GradientBundle grad;
};

/// Loss and (optionally) gradient of E = J^L + J^R + gamma * Psi. An empty
/// right task disables that channel: J^R = 0, Psi = 0 and the right decoder
/// receives a zero gradient. This is how single-channel models are trained.
inline McaeEvaluation evaluate_mcae(const McaeModel& model, const ChannelTask& left,
                                    const ChannelTask& right, bool want_grad) {
  const Hyper& h = model.hyper;
  h.validate();
  detail::check_task(model.encoder, model.decoder_left, left, "mcae(left)");
  const bool two_channels = !right.empty();
  if (two_channels) detail::check_task(model.encoder, model.decoder_right, right, "mcae(right)");

  const bool per_channel = h.encoder_decay_per_channel;
  auto L = detail::channel_eval(model.encoder, model.decoder_left, left, h, per_channel, want_grad);
  std::optional<detail::ChannelEval> R;
  if (two_channels)
    R = detail::channel_eval(model.encoder, model.decoder_right, right, h, per_channel, want_grad);

  McaeEvaluation out;
  out.loss.J_left = L.loss.J;
  out.loss.J_right = R ? R->loss.J : 0.0;
  const double diff = R ? out.loss.J_left - out.loss.J_right : 0.0;
  const double shared_decay = per_channel ? 0.0 : 0.5 * h.lambda * model.encoder.W.squaredNorm();
  out.loss.E = out.loss.J_left + out.loss.J_right + h.gamma * 0.5 * diff * diff + shared_decay;
  if (!want_grad) return out;

  out.grad = GradientBundle::zeros_like(model);
  const double wl = 1.0 + h.gamma * diff;
  const double wr = 1.0 - h.gamma * diff;
  out.grad.d_W_e = wl * L.d_W_e;
  out.grad.d_b_e = wl * L.d_b_e;
  out.grad.d_W_d_left = wl * L.d_W_d;
  out.grad.d_b_d_left = wl * L.d_b_d;
  if (R) {
    out.grad.d_W_e += wr * R->d_W_e;
    out.grad.d_b_e += wr * R->d_b_e;
    out.grad.d_W_d_right = wr * R->d_W_d;
    out.grad.d_b_d_right = wr * R->d_b_d;
  }
  if (!per_channel) out.grad.d_W_e += h.lambda * model.encoder.W;
  return out;
}

inline McaeLoss mcae_loss(const McaeModel& model, const ChannelTask& left, const ChannelTask& right) {
  if (right.empty()) throw InvalidArgument("mcae_loss: empty right task (n = 0)");
  return evaluate_mcae(model, left, right, false).loss;
}

/// Exact gradient of mcae_loss. The encoder receives
/// dJL + dJR + gamma (JL - JR)(dJL - dJR); the left decoder (1 + gamma (JL - JR)) dJL;
/// the right decoder (1 - gamma (JL - JR)) dJR.
inline GradientBundle mcae_gradients(const McaeModel& model, const ChannelTask& left,
                                     const ChannelTask& right) {
  if (right.empty()) throw InvalidArgument("mcae_gradients: empty right task (n = 0)");
  return evaluate_mcae(model, left, right, true).grad;
}

}  // namespace mcae
