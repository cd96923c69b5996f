#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mcae/eval/metrics.hpp"
#include "mcae/eval/results.hpp"
#include "mcae/nnet/autoencoder.hpp"

namespace mcae {

struct GapCondition {
  std::string name;
  std::vector<double> per_pair;  // NaN where a row is constant
  double mean = 0.0;             // over defined pairs
  int undefined = 0;
};

struct GapReport {
  std::vector<GapCondition> conditions;

  const GapCondition* find(const std::string& name) const {
    for (const auto& c : conditions)
      if (c.name == name) return &c;
    return nullptr;
  }

  /// One row per pair plus a final "mean" row.
  std::string to_csv() const {
    std::ostringstream out;
    out << "pair";
    for (const auto& c : conditions) out << ',' << c.name;
    out << '\n';
    const std::size_t n = conditions.empty() ? 0 : conditions.front().per_pair.size();
    for (std::size_t i = 0; i < n; ++i) {
      out << i;
      for (const auto& c : conditions)
        out << ',' << (std::isnan(c.per_pair[i]) ? std::string("nan") : detail::fixed6(c.per_pair[i]));
      out << '\n';
    }
    out << "mean";
    for (const auto& c : conditions) out << ',' << detail::fixed6(c.mean);
    out << '\n';
    return out.str();
  }
};

/// Row-wise Pearson correlations between matched rows of a and b.
inline GapCondition pairwise_correlation(const std::string& name, const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidArgument("gap_report: matrices differ in shape (" + shape_of(a) + " vs " + shape_of(b) + ")");
  GapCondition c{name, {}, 0.0, 0};
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double r = std::numeric_limits<double>::quiet_NaN();
    try {
      r = pearson_corr(Vector(a.row(i).transpose()), Vector(b.row(i).transpose()));
      sum += r;
    } catch (const DomainError&) {
      ++c.undefined;
    }
    c.per_pair.push_back(r);
  }
  const auto defined = a.rows() - c.undefined;
  c.mean = defined > 0 ? sum / static_cast<double>(defined) : std::numeric_limits<double>::quiet_NaN();
  return c;
}

inline Matrix reconstruct(const McaeModel& m, const Matrix& x, bool left) {
  return decode(left ? m.decoder_left : m.decoder_right, encode(m.encoder, x));
}

/// Row i of real is paired with row i of syn. The MCAE reconstructs syn with
/// the left decoder and real with the right; single-channel baselines use
/// their only (left) decoder for both.
inline GapReport gap_report(const Matrix& real, const Matrix& syn, const McaeModel& model,
                            const std::optional<McaeModel>& sae_syn_real = std::nullopt,
                            const std::optional<McaeModel>& sae_real_real = std::nullopt) {
  if (real.rows() != syn.rows())
    throw InvalidArgument("gap_report: " + std::to_string(real.rows()) + " real rows vs " +
                          std::to_string(syn.rows()) + " synthetic rows");
  if (real.rows() == 0) throw InvalidArgument("gap_report: no pairs");
  GapReport rep;
  rep.conditions.push_back(pairwise_correlation("raw", real, syn));
  rep.conditions.push_back(
      pairwise_correlation("mcae", reconstruct(model, real, false), reconstruct(model, syn, true)));
  if (sae_syn_real)
    rep.conditions.push_back(pairwise_correlation("sae_syn_real", reconstruct(*sae_syn_real, real, true),
                                                  reconstruct(*sae_syn_real, syn, true)));
  if (sae_real_real)
    rep.conditions.push_back(pairwise_correlation("sae_real_real", reconstruct(*sae_real_real, real, true),
                                                  reconstruct(*sae_real_real, syn, true)));
  return rep;
}

/// Hidden-layer codes of every row: id, role, class, h_1..h_k.
inline std::string embeddings_csv(const McaeModel& model, const Matrix& real, const Matrix& syn,
                                  const std::vector<std::string>& classes) {
  const Matrix hr = encode(model.encoder, real), hs = encode(model.encoder, syn);
  std::ostringstream out;
  out << "id,role,class";
  for (Eigen::Index j = 0; j < hr.cols(); ++j) out << ",h_" << j + 1;
  out << '\n';
  auto rows = [&](const Matrix& h, const char* role) {
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      const auto ci = static_cast<std::size_t>(i);
      out << i << ',' << role << ',' << detail::csv_field(ci < classes.size() ? classes[ci] : "");
      for (Eigen::Index j = 0; j < h.cols(); ++j) out << ',' << detail::fixed6(h(i, j));
      out << '\n';
    }
  };
  rows(hr, "real");
  rows(hs, "syn");
  return out.str();
}

}  // namespace mcae
