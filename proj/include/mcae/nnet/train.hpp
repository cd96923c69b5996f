#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "mcae/nnet/autoencoder.hpp"
#include "mcae/optim/lbfgs.hpp"

namespace mcae {

enum class OptimizerKind { Lbfgs, MiniBatchGd };

struct TrainOptions {
  OptimizerKind optimizer = OptimizerKind::Lbfgs;
  int max_iters = 400;
  double tol = 1e-6;
  int history = 10;
  // Mini-batch gradient descent only; one iteration is one epoch.
  double learning_rate = 0.5;
  int batch_size = 100;
  std::uint64_t seed = 0;
};

struct TraceRow {
  int iteration = 0;
  double E = 0.0;
  double J_left = 0.0;
  double J_right = 0.0;
  double grad_norm = 0.0;
};

struct TrainingTrace {
  std::vector<TraceRow> rows;
  std::string stop_reason;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, TrainingTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const TrainingTrace& trace() const noexcept { return trace_; }

 private:
  TrainingTrace trace_;
};

struct TrainResult {
  McaeModel model;
  TrainingTrace trace;
};

namespace detail {

inline ChannelTask take_rows(const ChannelTask& t, const std::vector<Eigen::Index>& idx,
                             std::size_t begin, std::size_t end) {
  ChannelTask out{Matrix(static_cast<Eigen::Index>(end - begin), t.inputs.cols()),
                  Matrix(static_cast<Eigen::Index>(end - begin), t.targets.cols())};
  for (std::size_t i = begin; i < end; ++i) {
    out.inputs.row(static_cast<Eigen::Index>(i - begin)) = t.inputs.row(idx[i]);
    out.targets.row(static_cast<Eigen::Index>(i - begin)) = t.targets.row(idx[i]);
  }
  return out;
}

inline TrainResult train_minibatch(McaeModel model, const ChannelTask& left,
                                   const ChannelTask& right, const TrainOptions& opts) {
  TrainingTrace trace;
  std::mt19937_64 rng(opts.seed);
  auto record = [&](int it) {
    auto ev = evaluate_mcae(model, left, right, true);
    if (!std::isfinite(ev.loss.E))
      throw TrainingError("training: non-finite loss at iteration " + std::to_string(it), trace);
    trace.rows.push_back(
        {it, ev.loss.E, ev.loss.J_left, ev.loss.J_right, flatten(ev.grad).norm()});
  };
  record(0);
  std::vector<Eigen::Index> li(left.size()), ri(right.size());
  std::iota(li.begin(), li.end(), 0);
  std::iota(ri.begin(), ri.end(), 0);
  const auto n = static_cast<std::size_t>(std::max(left.size(), right.size()));
  const std::size_t batches =
      std::max<std::size_t>(1, n / static_cast<std::size_t>(std::max(1, opts.batch_size)));
  for (int it = 1; it <= opts.max_iters; ++it) {
    if (trace.rows.back().grad_norm < opts.tol) break;
    std::shuffle(li.begin(), li.end(), rng);
    std::shuffle(ri.begin(), ri.end(), rng);
    for (std::size_t b = 0; b < batches; ++b) {
      const auto lb = take_rows(left, li, b * li.size() / batches, (b + 1) * li.size() / batches);
      const auto rb = right.empty()
                          ? ChannelTask{}
                          : take_rows(right, ri, b * ri.size() / batches, (b + 1) * ri.size() / batches);
      if (lb.empty()) continue;
      Vector theta = flatten(model);
      try {
        theta -= opts.learning_rate * flatten(evaluate_mcae(model, lb, rb, true).grad);
      } catch (const DomainError& e) {
        throw TrainingError(std::string("training: ") + e.what(), trace);
      }
      unflatten(theta, model);
    }
    record(it);
  }
  trace.stop_reason = trace.rows.back().grad_norm < opts.tol ? "gradient-tolerance" : "max-iterations";
  return {std::move(model), std::move(trace)};
}

}  // namespace detail

/// Minimizes E over all parameters, starting from `model`. An empty right
/// task trains the left channel alone. With L-BFGS every accepted iterate
/// lowers E.
inline TrainResult train(McaeModel model, const ChannelTask& left, const ChannelTask& right,
                         const TrainOptions& opts) {
  if (opts.max_iters < 1) throw InvalidArgument("train: max_iters must be >= 1");
  model.validate();
  left.validate();
  if (!right.empty()) right.validate();
  // Surface shape errors before optimizing.
  (void)evaluate_mcae(model, left, right, false);

  if (opts.optimizer == OptimizerKind::MiniBatchGd)
    return detail::train_minibatch(std::move(model), left, right, opts);

  McaeModel scratch = model;
  auto objective = [&](const Vector& theta, Vector& grad) -> double {
    unflatten(theta, scratch);
    try {
      auto ev = evaluate_mcae(scratch, left, right, true);
      grad = flatten(ev.grad);
      return ev.loss.E;
    } catch (const DomainError&) {
      // Saturated hidden units: reject the step.
      grad.setConstant(std::numeric_limits<double>::quiet_NaN());
      return std::numeric_limits<double>::infinity();
    }
  };

  TrainingTrace trace;
  auto on_iter = [&](const optim::IterationInfo& info) {
    unflatten(*info.x, scratch);
    auto loss = evaluate_mcae(scratch, left, right, false).loss;
    trace.rows.push_back({info.iteration, info.f, loss.J_left, loss.J_right, info.grad_norm});
  };

  optim::LbfgsOptions lo;
  lo.max_iters = opts.max_iters;
  lo.tol = opts.tol;
  lo.history = opts.history;
  const auto res = optim::Lbfgs(lo).minimize(objective, flatten(model), on_iter);
  if (!std::isfinite(res.f) || trace.rows.empty())
    throw TrainingError("training: non-finite loss at the initial parameters", trace);
  trace.stop_reason = optim::to_string(res.reason);
  unflatten(res.x, model);
  return {std::move(model), std::move(trace)};
}

/// Column-wise concatenation [a | b] of two tasks with equal row counts.
/// The CIAE task <i: Xs Xr, t: Xr Xr> is concat_columns(<Xs,Xr>, <Xr,Xr>).
inline ChannelTask concat_columns(const ChannelTask& a, const ChannelTask& b) {
  if (a.size() != b.size())
    throw InvalidArgument("concat_columns: row counts differ (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  ChannelTask out{Matrix(a.size(), a.inputs.cols() + b.inputs.cols()),
                  Matrix(a.size(), a.targets.cols() + b.targets.cols())};
  out.inputs << a.inputs, b.inputs;
  out.targets << a.targets, b.targets;
  return out;
}

/// Single-channel autoencoder <i:X, t:Y> trained as an MCAE with the right
/// channel disabled and gamma = 0. The right decoder stays at its initial
/// value and is never used.
inline TrainResult train_single_channel(const ChannelTask& task, int hidden, Hyper hyper,
                                        const TrainOptions& opts, std::uint64_t seed) {
  if (task.empty()) throw InvalidArgument("train_single_channel: empty task");
  hyper.gamma = 0.0;
  auto model = make_model(static_cast<int>(task.inputs.cols()), hidden, hyper, seed);
  return train(std::move(model), task, ChannelTask{}, opts);
}

}  // namespace mcae
