#pragma once

#include <cstdint>
#include <vector>

#include "mcae/data/labeled.hpp"
#include "mcae/optim/lbfgs.hpp"

namespace mcae {

/// Multinomial logistic regression. weights is C x (d + 1); the last column
/// holds the biases.
struct SoftmaxModel {
  Matrix weights;

  int classes() const { return static_cast<int>(weights.rows()); }
  int dims() const { return static_cast<int>(weights.cols()) - 1; }

  /// n x C class probabilities; rows sum to 1.
  Matrix probabilities(const Matrix& X) const {
    if (X.cols() != dims())
      throw InvalidArgument("softmax: input has " + std::to_string(X.cols()) + " features, model " +
                            std::to_string(dims()));
    Matrix z = X * weights.leftCols(dims()).transpose();
    z.rowwise() += weights.col(dims()).transpose();
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      z.row(i).array() -= z.row(i).maxCoeff();
      z.row(i) = z.row(i).array().exp().matrix();
      z.row(i) /= z.row(i).sum();
    }
    return z;
  }

  std::vector<int> predict(const Matrix& X) const {
    const Matrix p = probabilities(X);
    std::vector<int> out(static_cast<std::size_t>(p.rows()));
    for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i).maxCoeff(&out[static_cast<std::size_t>(i)]);
    return out;
  }
};

struct SoftmaxOptions {
  double reg = 1e-4;  // L2 on the non-bias weights
  int max_iters = 500;
  double tol = 1e-6;
};

/// Mean cross-entropy + reg/2 ||W||^2 (biases unpenalized), zero start,
/// L-BFGS. The result is fully determined by the data and options; the seed
/// is recorded for interface symmetry only.
inline SoftmaxModel train_softmax(const LabeledFeatures& train, const SoftmaxOptions& opts = {},
                                  std::uint64_t seed = 0) {
  (void)seed;
  train.validate();
  if (opts.reg < 0) throw InvalidArgument("train_softmax: reg must be >= 0");
  const int C = train.num_classes();
  {
    std::vector<bool> seen(static_cast<std::size_t>(C), false);
    int distinct = 0;
    for (int l : train.labels)
      if (!seen[static_cast<std::size_t>(l)]) seen[static_cast<std::size_t>(l)] = true, ++distinct;
    if (distinct < 2) throw InvalidArgument("train_softmax: training set has a single class");
  }
  const Matrix& X = train.features;
  const auto n = X.rows();
  const auto d = X.cols();
  Matrix Y = Matrix::Zero(n, C);
  for (Eigen::Index i = 0; i < n; ++i) Y(i, train.labels[static_cast<std::size_t>(i)]) = 1.0;

  SoftmaxModel model{Matrix::Zero(C, d + 1)};
  auto objective = [&](const Vector& theta, Vector& grad) {
    model.weights = Eigen::Map<const Matrix>(theta.data(), C, d + 1);
    Matrix z = X * model.weights.leftCols(d).transpose();
    z.rowwise() += model.weights.col(d).transpose();
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mx = z.row(i).maxCoeff();
      z.row(i).array() -= mx;
      const double lse = std::log(z.row(i).array().exp().sum());
      loss -= (z.row(i).array() * Y.row(i).array()).sum() - lse;
      z.row(i) = (z.row(i).array() - lse).exp().matrix();
    }
    loss /= static_cast<double>(n);
    const Matrix diff = (z - Y) / static_cast<double>(n);
    Matrix g(C, d + 1);
    g.leftCols(d) = diff.transpose() * X + opts.reg * model.weights.leftCols(d);
    g.col(d) = diff.colwise().sum().transpose();
    loss += 0.5 * opts.reg * model.weights.leftCols(d).squaredNorm();
    grad = Eigen::Map<const Vector>(g.data(), g.size());
    return loss;
  };
  optim::LbfgsOptions lo;
  lo.max_iters = opts.max_iters;
  lo.tol = opts.tol;
  const auto res = optim::Lbfgs(lo).minimize(objective, Vector::Zero(C * (d + 1)));
  model.weights = Eigen::Map<const Matrix>(res.x.data(), C, d + 1);
  return model;
}

}  // namespace mcae
