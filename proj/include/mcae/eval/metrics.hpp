#pragma once

#include <cmath>
#include <vector>

#include "mcae/data/labeled.hpp"

namespace mcae {

/// counts(truth, predicted).
struct ConfusionMatrix {
  Eigen::MatrixXi counts;

  explicit ConfusionMatrix(int classes = 0) : counts(Eigen::MatrixXi::Zero(classes, classes)) {}

  int classes() const { return static_cast<int>(counts.rows()); }
  long total() const { return counts.cast<long>().sum(); }
  void add(int truth, int predicted) {
    if (truth < 0 || predicted < 0 || truth >= classes() || predicted >= classes())
      throw InvalidArgument("confusion matrix: class id out of range");
    ++counts(truth, predicted);
  }
};

inline ConfusionMatrix confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted,
                                        int classes) {
  if (truth.size() != predicted.size())
    throw InvalidArgument("confusion_matrix: " + std::to_string(truth.size()) + " labels vs " +
                          std::to_string(predicted.size()) + " predictions");
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

struct F1Scores {
  std::vector<double> per_class;
  double macro = 0.0;
};

/// Per-class F1 (0 when precision + recall is 0) and their unweighted mean.
inline F1Scores f1_score(const ConfusionMatrix& cm) {
  if (cm.classes() == 0) throw InvalidArgument("f1_score: empty confusion matrix");
  F1Scores out;
  for (int c = 0; c < cm.classes(); ++c) {
    const double tp = cm.counts(c, c);
    const double col = cm.counts.col(c).sum(), row = cm.counts.row(c).sum();
    const double p = col > 0 ? tp / col : 0.0;
    const double r = row > 0 ? tp / row : 0.0;
    out.per_class.push_back(p + r > 0 ? 2 * p * r / (p + r) : 0.0);
  }
  for (double f : out.per_class) out.macro += f;
  out.macro /= static_cast<double>(out.per_class.size());
  return out;
}

/// Cov(x, y) / (sd(x) sd(y)).
template <typename A, typename B>
double pearson_corr(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  if (x.size() != y.size()) throw InvalidArgument("pearson_corr: lengths differ");
  if (x.size() < 2) throw InvalidArgument("pearson_corr: need at least 2 values");
  const Eigen::ArrayXd xa = Eigen::Map<const Eigen::ArrayXd>(x.derived().eval().data(), x.size());
  const Eigen::ArrayXd ya = Eigen::Map<const Eigen::ArrayXd>(y.derived().eval().data(), y.size());
  const Eigen::ArrayXd dx = xa - xa.mean(), dy = ya - ya.mean();
  const double sxx = dx.square().sum(), syy = dy.square().sum();
  if (sxx == 0.0 || syy == 0.0) throw DomainError("pearson_corr: undefined for a constant vector");
  return std::clamp((dx * dy).sum() / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace mcae
