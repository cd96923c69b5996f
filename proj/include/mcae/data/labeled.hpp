#pragma once

#include <string>
#include <vector>

#include "mcae/nnet/params.hpp"

namespace mcae {

/// Row-per-instance features with integer class ids.
struct LabeledFeatures {
  Matrix features;  // n x d
  std::vector<int> labels;
  std::vector<std::string> class_names;

  Eigen::Index size() const { return features.rows(); }
  int num_classes() const { return static_cast<int>(class_names.size()); }

  void validate() const {
    if (features.rows() < 1) throw InvalidArgument("labeled features: need at least one row");
    if (static_cast<Eigen::Index>(labels.size()) != features.rows())
      throw InvalidArgument("labeled features: " + std::to_string(labels.size()) + " labels for " +
                            std::to_string(features.rows()) + " rows");
    for (int l : labels)
      if (l < 0 || l >= num_classes())
        throw InvalidArgument("label id " + std::to_string(l) + " outside 0.." +
                              std::to_string(num_classes() - 1));
  }

  /// Rows [begin, end).
  LabeledFeatures slice(Eigen::Index begin, Eigen::Index end) const {
    if (begin < 0 || end > size() || begin > end) throw InvalidArgument("slice out of range");
    return {features.middleRows(begin, end - begin),
            {labels.begin() + begin, labels.begin() + end},
            class_names};
  }
};

inline std::vector<std::string> digit_class_names() {
  std::vector<std::string> out;
  for (int i = 0; i < 10; ++i) out.push_back(std::to_string(i));
  return out;
}

/// Stacks rows of a over rows of b; class lists must agree.
inline LabeledFeatures stack_rows(const LabeledFeatures& a, const LabeledFeatures& b) {
  if (a.class_names != b.class_names) throw InvalidArgument("stack_rows: class lists differ");
  if (a.features.cols() != b.features.cols() && a.size() > 0 && b.size() > 0)
    throw InvalidArgument("stack_rows: feature widths differ");
  const auto cols = a.size() > 0 ? a.features.cols() : b.features.cols();
  LabeledFeatures out{Matrix(a.size() + b.size(), cols), a.labels, a.class_names};
  if (a.size() > 0) out.features.topRows(a.size()) = a.features;
  if (b.size() > 0) out.features.bottomRows(b.size()) = b.features;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  return out;
}

}  // namespace mcae
