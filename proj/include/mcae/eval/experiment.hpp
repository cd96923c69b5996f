#pragma once

#include <map>
#include <string>
#include <vector>

#include "mcae/data/corpus.hpp"
#include "mcae/eval/metrics.hpp"
#include "mcae/eval/results.hpp"
#include "mcae/eval/softmax.hpp"
#include "mcae/nnet/train.hpp"

namespace mcae {

enum class AeVariant { Mcae, Ciae, Sae, Identity };
enum class FeatureType { Encoded, Reconstructed };
enum class DataMix { Real, Syn2, RealSyn2 };

inline std::string to_string(AeVariant v) {
  switch (v) {
    case AeVariant::Mcae: return "mcae";
    case AeVariant::Ciae: return "ciae";
    case AeVariant::Sae: return "sae";
    case AeVariant::Identity: return "identity";
  }
  return "";
}
inline std::string to_string(FeatureType f) { return f == FeatureType::Encoded ? "encoded" : "reconstructed"; }
inline std::string to_string(DataMix m) {
  switch (m) {
    case DataMix::Real: return "real";
    case DataMix::Syn2: return "syn2";
    case DataMix::RealSyn2: return "real+syn2";
  }
  return "";
}

/// Corpus names usable in a channel: real, syn1, syn2, or two of them joined
/// by '+' for column concatenation (CIAE only).
struct ChannelSpec {
  std::string input;
  std::string target;
  bool operator==(const ChannelSpec&) const = default;
};

/// One table row.
struct ExperimentRow {
  AeVariant variant = AeVariant::Mcae;
  std::vector<ChannelSpec> channels{{"syn1", "real"}, {"real", "real"}};
  int hidden = 100;
  Hyper hyper{};
  TrainOptions train{};
  FeatureType feature = FeatureType::Encoded;
  DataMix mix = DataMix::RealSyn2;
  SoftmaxOptions classifier{};
  std::uint64_t seed = 1;
};

struct DatasetConfig {
  std::string kind = "digits";  // digits | roof
  DigitDataOptions digits{};
  RoofDataOptions roof{};
};

struct ExperimentConfig {
  DatasetConfig dataset;
  std::vector<ExperimentRow> rows;
};

inline ExperimentData build_data(const DatasetConfig& cfg) {
  if (cfg.kind == "digits") return build_digit_data(cfg.digits);
  if (cfg.kind == "roof") return build_roof_data(cfg.roof);
  throw ValidationError("unknown dataset kind '" + cfg.kind + "'");
}

namespace detail {

inline std::vector<std::string> split_plus(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto p = s.find('+', pos);
    out.push_back(s.substr(pos, p == std::string::npos ? std::string::npos : p - pos));
    if (p == std::string::npos) break;
    pos = p + 1;
  }
  return out;
}

inline const LabeledFeatures& corpus_by_name(const ExperimentData& d, const std::string& name) {
  if (name == "real") return d.real;
  if (name == "syn1") return d.syn1;
  if (name == "syn2") return d.syn2;
  throw ValidationError("unknown corpus '" + name + "' (expected real, syn1 or syn2)");
}

inline Matrix corpus_matrix(const ExperimentData& d, const std::string& spec) {
  const auto parts = split_plus(spec);
  std::vector<const Matrix*> mats;
  for (const auto& p : parts) mats.push_back(&corpus_by_name(d, p).features);
  Eigen::Index cols = 0;
  for (const auto* m : mats) {
    if (m->rows() != mats.front()->rows())
      throw ValidationError("corpora in '" + spec + "' differ in row count");
    cols += m->cols();
  }
  Matrix out(mats.front()->rows(), cols);
  Eigen::Index at = 0;
  for (const auto* m : mats) out.middleCols(at, m->cols()) = *m, at += m->cols();
  return out;
}

inline std::string pretty_corpus(const std::string& spec) {
  std::string out;
  for (const auto& p : split_plus(spec)) {
    if (!out.empty()) out += "+";
    out += p == "real" ? "Real" : p == "syn1" ? "Syn I" : p == "syn2" ? "Syn II" : p;
  }
  return out;
}

}  // namespace detail

/// Channel notation, e.g. "<i:Syn I,t:Real>^L <i:Real,t:Real>^R".
inline std::string describe_channels(AeVariant v, const std::vector<ChannelSpec>& ch) {
  if (v == AeVariant::Identity) return "none";
  std::string out;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (i) out += " ";
    out += "<i:" + detail::pretty_corpus(ch[i].input) + ",t:" + detail::pretty_corpus(ch[i].target) + ">";
    if (v == AeVariant::Mcae) out += i == 0 ? "^L" : "^R";
  }
  return out;
}

inline std::string pretty_mix(DataMix m) {
  switch (m) {
    case DataMix::Real: return "Real";
    case DataMix::Syn2: return "Syn II";
    case DataMix::RealSyn2: return "Real+Syn II";
  }
  return "";
}

/// Problems with a row, all at once; empty if valid.
inline std::vector<std::string> row_problems(const ExperimentRow& r) {
  std::vector<std::string> out;
  const std::size_t want = r.variant == AeVariant::Mcae ? 2 : r.variant == AeVariant::Identity ? 0 : 1;
  if (r.variant != AeVariant::Identity && r.channels.size() != want)
    out.push_back(to_string(r.variant) + " needs exactly " + std::to_string(want) + " channel(s), got " +
                  std::to_string(r.channels.size()));
  for (const auto& c : r.channels)
    for (const auto* s : {&c.input, &c.target}) {
      const auto parts = detail::split_plus(*s);
      for (const auto& p : parts)
        if (p != "real" && p != "syn1" && p != "syn2") out.push_back("unknown corpus '" + p + "' in channel");
      if (parts.size() > 1 && r.variant != AeVariant::Ciae)
        out.push_back("concatenated corpus '" + *s + "' is only valid for ciae");
    }
  if (r.variant == AeVariant::Ciae && r.channels.size() == 1 &&
      detail::split_plus(r.channels[0].input).size() != 2)
    out.push_back("ciae input must concatenate two corpora, e.g. syn1+real");
  if (r.hidden < 1) out.push_back("hidden must be >= 1");
  if (r.train.max_iters < 1) out.push_back("optimizer.max_iters must be >= 1");
  if (r.classifier.reg < 0) out.push_back("classifier.reg must be >= 0");
  try {
    r.hyper.validate();
  } catch (const std::exception& e) {
    out.push_back(e.what());
  }
  return out;
}

/// A trained (or pass-through) feature extractor for one row.
class FeatureMap {
 public:
  FeatureMap(AeVariant v, std::vector<ChannelSpec> channels, std::optional<McaeModel> model)
      : variant_(v), channels_(std::move(channels)), model_(std::move(model)) {}

  const std::optional<McaeModel>& model() const { return model_; }

  /// Rows of x are instances of the given role ("real" or a synthetic corpus).
  Matrix operator()(const Matrix& x, bool synthetic, FeatureType f) const {
    if (variant_ == AeVariant::Identity) return x;
    const auto& m = *model_;
    Matrix in = x;
    if (variant_ == AeVariant::Ciae) {
      // A lone instance stands in for both halves of the concatenated input.
      in.resize(x.rows(), 2 * x.cols());
      in << x, x;
    }
    const Matrix h = encode(m.encoder, in);
    if (f == FeatureType::Encoded) return h;
    return decode(decoder_for(synthetic), h);
  }

 private:
  const DecoderParams& decoder_for(bool synthetic) const {
    if (variant_ != AeVariant::Mcae) return model_->decoder_left;
    // The channel whose input corpus has the instance's role.
    const bool left_syn = channels_[0].input != "real";
    const bool right_syn = channels_[1].input != "real";
    if (synthetic == left_syn) return model_->decoder_left;
    if (synthetic == right_syn) return model_->decoder_right;
    return model_->decoder_left;
  }

  AeVariant variant_;
  std::vector<ChannelSpec> channels_;
  std::optional<McaeModel> model_;
};

inline TrainResult train_autoencoder(const ExperimentData& d, const ExperimentRow& r) {
  TrainOptions opts = r.train;
  opts.seed = r.seed;
  auto task = [&](const ChannelSpec& c) {
    ChannelTask t{detail::corpus_matrix(d, c.input), detail::corpus_matrix(d, c.target)};
    if (t.inputs.rows() != t.targets.rows())
      throw ValidationError("channel <" + c.input + "," + c.target + "> pairs corpora of different sizes");
    return t;
  };
  if (r.variant == AeVariant::Mcae) {
    const auto left = task(r.channels[0]);
    const auto right = task(r.channels[1]);
    auto model = make_model(static_cast<int>(left.inputs.cols()), r.hidden, r.hyper, r.seed);
    return train(std::move(model), left, right, opts);
  }
  return train_single_channel(task(r.channels[0]), r.hidden, r.hyper, opts, r.seed);
}

inline FeatureMap fit_feature_map(const ExperimentData& d, const ExperimentRow& r) {
  if (r.variant == AeVariant::Identity) return FeatureMap(r.variant, r.channels, std::nullopt);
  return FeatureMap(r.variant, r.channels, train_autoencoder(d, r).model);
}

/// Classifier training features and labels for the row's data mix.
inline LabeledFeatures mix_features(const ExperimentData& d, const FeatureMap& fm, DataMix mix,
                                    FeatureType f) {
  LabeledFeatures real{fm(d.real.features, false, f), d.real.labels, d.real.class_names};
  if (mix == DataMix::Real) return real;
  if (d.syn2.size() == 0) throw ValidationError("data mix " + to_string(mix) + " needs Syn II data");
  LabeledFeatures syn{fm(d.syn2.features, true, f), d.syn2.labels, d.syn2.class_names};
  if (mix == DataMix::Syn2) return syn;
  return stack_rows(real, syn);
}

inline ResultRow run_row(const ExperimentData& d, const ExperimentRow& r) {
  if (const auto problems = row_problems(r); !problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw StageError("config", msg);
  }
  auto stage = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
  };
  const FeatureMap fm = stage("autoencoder", [&] { return fit_feature_map(d, r); });
  const auto train_set = stage("features", [&] { return mix_features(d, fm, r.mix, r.feature); });
  const auto test_x = stage("features", [&] { return fm(d.test.features, false, r.feature); });
  const auto clf = stage("classifier", [&] { return train_softmax(train_set, r.classifier, r.seed); });
  const auto scores = stage("evaluate", [&] {
    return f1_score(confusion_matrix(d.test.labels, clf.predict(test_x), d.test.num_classes()));
  });
  return {to_string(r.variant) == "identity" ? "identity" : [&] {
            std::string v = to_string(r.variant);
            for (auto& c : v) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            return v;
          }(),
          describe_channels(r.variant, r.channels), to_string(r.feature), pretty_mix(r.mix),
          scores.macro, scores.per_class, r.seed};
}

inline ResultsTable run_experiment(const ExperimentConfig& cfg, const ExperimentData& data) {
  ResultsTable t;
  for (const auto& r : cfg.rows) t.rows.push_back(run_row(data, r));
  return t;
}

inline ResultsTable run_experiment(const ExperimentConfig& cfg) {
  ExperimentData data;
  try {
    data = build_data(cfg.dataset);
  } catch (const std::exception& e) {
    throw StageError("dataset", e.what());
  }
  return run_experiment(cfg, data);
}

}  // namespace mcae
