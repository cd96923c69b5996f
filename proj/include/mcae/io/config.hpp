#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "mcae/eval/experiment.hpp"
#include "mcae/io/model_io.hpp"

namespace mcae::io {

struct LoadedConfig {
  ExperimentConfig config;
  std::vector<std::string> warnings;
};

namespace detail {

/// Reads fields off one JSON object, recording type problems and unknown keys.
class Reader {
 public:
  Reader(const Json& obj, std::string where, std::vector<std::string>& problems,
         std::vector<std::string>& warnings)
      : obj_(obj), where_(std::move(where)), problems_(problems), warnings_(warnings) {
    if (!obj_.is_object()) problems_.push_back(where_ + " must be an object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return obj_.is_object() && obj_.contains(key);
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (!has(key)) return;
    const auto& v = obj_.at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::runtime_error("");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::runtime_error("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw std::runtime_error("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::runtime_error("");
      }
      out = v.get<T>();
    } catch (const std::exception&) {
      problems_.push_back(path(key) + " has the wrong type");
    }
  }

  const Json& at(const char* key) const { return obj_.at(key); }
  std::string path(const char* key) const { return where_ + "." + key; }

  void warn_unknown() {
    if (!obj_.is_object()) return;
    for (const auto& [k, v] : obj_.items())
      if (!seen_.count(k)) warnings_.push_back("unknown field " + where_ + "." + k + " ignored");
  }

 private:
  const Json& obj_;
  std::string where_;
  std::vector<std::string>& problems_;
  std::vector<std::string>& warnings_;
  std::set<std::string> seen_;
};

inline std::vector<ChannelSpec> default_channels(AeVariant v) {
  switch (v) {
    case AeVariant::Mcae: return {{"syn1", "real"}, {"real", "real"}};
    case AeVariant::Ciae: return {{"syn1+real", "real+real"}};
    case AeVariant::Sae: return {{"real", "real"}};
    case AeVariant::Identity: return {};
  }
  return {};
}

inline void read_row(const Json& j, const std::string& where, ExperimentRow& row,
                     std::vector<std::string>& problems, std::vector<std::string>& warnings) {
  Reader r(j, where, problems, warnings);
  if (r.has("ae_variant")) {
    std::string v;
    r.get("ae_variant", v);
    if (v == "mcae") row.variant = AeVariant::Mcae;
    else if (v == "ciae") row.variant = AeVariant::Ciae;
    else if (v == "sae") row.variant = AeVariant::Sae;
    else if (v == "identity") row.variant = AeVariant::Identity;
    else problems.push_back(r.path("ae_variant") + ": unknown variant '" + v + "' (mcae, ciae, sae, identity)");
    if (!j.contains("channels")) row.channels = default_channels(row.variant);
  }
  if (r.has("channels")) {
    const auto& ch = r.at("channels");
    row.channels.clear();
    if (!ch.is_array()) problems.push_back(r.path("channels") + " must be an array");
    else
      for (const auto& c : ch) {
        if (c.is_array() && c.size() == 2 && c[0].is_string() && c[1].is_string())
          row.channels.push_back({c[0].get<std::string>(), c[1].get<std::string>()});
        else if (c.is_object() && c.contains("input") && c.contains("target") && c["input"].is_string() &&
                 c["target"].is_string())
          row.channels.push_back({c["input"].get<std::string>(), c["target"].get<std::string>()});
        else
          problems.push_back(r.path("channels") + ": each channel is [input, target] or {input, target}");
      }
  }
  r.get("hidden", row.hidden);
  if (r.has("hyper")) {
    Reader h(r.at("hyper"), r.path("hyper"), problems, warnings);
    h.get("lambda", row.hyper.lambda);
    h.get("rho", row.hyper.rho);
    h.get("delta", row.hyper.delta);
    h.get("gamma", row.hyper.gamma);
    h.get("encoder_decay_per_channel", row.hyper.encoder_decay_per_channel);
    h.warn_unknown();
  }
  if (r.has("optimizer")) {
    Reader o(r.at("optimizer"), r.path("optimizer"), problems, warnings);
    if (o.has("kind")) {
      std::string k;
      o.get("kind", k);
      if (k == "lbfgs") row.train.optimizer = OptimizerKind::Lbfgs;
      else if (k == "minibatch") row.train.optimizer = OptimizerKind::MiniBatchGd;
      else problems.push_back(o.path("kind") + ": unknown optimizer '" + k + "' (lbfgs, minibatch)");
    }
    o.get("max_iters", row.train.max_iters);
    o.get("tol", row.train.tol);
    o.get("history", row.train.history);
    o.get("learning_rate", row.train.learning_rate);
    o.get("batch_size", row.train.batch_size);
    o.warn_unknown();
  }
  if (r.has("feature_type")) {
    std::string f;
    r.get("feature_type", f);
    if (f == "encoded") row.feature = FeatureType::Encoded;
    else if (f == "reconstructed") row.feature = FeatureType::Reconstructed;
    else problems.push_back(r.path("feature_type") + ": unknown feature type '" + f + "'");
  }
  if (r.has("data_mix")) {
    std::string m;
    r.get("data_mix", m);
    if (m == "real") row.mix = DataMix::Real;
    else if (m == "syn2") row.mix = DataMix::Syn2;
    else if (m == "real+syn2") row.mix = DataMix::RealSyn2;
    else problems.push_back(r.path("data_mix") + ": unknown data mix '" + m + "' (real, syn2, real+syn2)");
  }
  if (r.has("classifier")) {
    Reader c(r.at("classifier"), r.path("classifier"), problems, warnings);
    c.get("reg", row.classifier.reg);
    c.get("max_iters", row.classifier.max_iters);
    c.get("tol", row.classifier.tol);
    c.warn_unknown();
  }
  r.get("seed", row.seed);
  r.has("name");  // free-form label, accepted silently
  r.warn_unknown();
}

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  const std::filesystem::path q(p);
  return q.is_absolute() ? p : (base / q).lexically_normal().string();
}

inline void read_dataset(const Json& j, const std::filesystem::path& base, DatasetConfig& d,
                         std::vector<std::string>& problems, std::vector<std::string>& warnings) {
  Reader r(j, "dataset", problems, warnings);
  r.get("kind", d.kind);
  if (d.kind == "digits") {
    r.get("train", d.digits.train_path);
    r.get("test", d.digits.test_path);
    r.get("train_count", d.digits.train_count);
    r.get("prototype_points", d.digits.prototypes.points);
    r.get("congeal_per_class", d.digits.prototypes.per_class);
    r.get("syn2_per_class", d.digits.syn2_per_class);
    r.get("seed", d.digits.seed);
    d.digits.train_path = resolve(base, d.digits.train_path);
    d.digits.test_path = resolve(base, d.digits.test_path);
    if (d.digits.train_path.empty()) problems.push_back("dataset.train: missing digits training file");
    else if (!std::filesystem::exists(d.digits.train_path))
      problems.push_back("dataset.train: corpus not found: " + d.digits.train_path);
    if (!d.digits.test_path.empty() && !std::filesystem::exists(d.digits.test_path))
      problems.push_back("dataset.test: corpus not found: " + d.digits.test_path);
    if (d.digits.prototypes.points < 3) problems.push_back("dataset.prototype_points must be >= 3");
    if (d.digits.prototypes.per_class < 2) problems.push_back("dataset.congeal_per_class must be >= 2");
    if (d.digits.syn2_per_class < 0) problems.push_back("dataset.syn2_per_class must be >= 0");
  } else if (d.kind == "roof") {
    r.get("styles", d.roof.styles);
    r.get("train_per_style", d.roof.train_per_style);
    r.get("test_per_style", d.roof.test_per_style);
    r.get("jitter", d.roof.jitter);
    r.get("clutter", d.roof.clutter);
    r.get("syn2_per_class", d.roof.syn2_per_class);
    r.get("seed", d.roof.seed);
    for (const auto& s : d.roof.styles)
      if (s != "gable" && s != "hip" && s != "pyramid")
        problems.push_back("dataset.styles: unknown roof style '" + s + "'");
    if (d.roof.styles.size() < 2) problems.push_back("dataset.styles needs at least 2 styles");
    if (d.roof.train_per_style < 2 || d.roof.test_per_style < 1)
      problems.push_back("dataset.train_per_style must be >= 2 and test_per_style >= 1");
    if (d.roof.jitter < 0) problems.push_back("dataset.jitter must be >= 0");
    if (d.roof.clutter < 0) problems.push_back("dataset.clutter must be >= 0");
    if (d.roof.syn2_per_class < 0) problems.push_back("dataset.syn2_per_class must be >= 0");
  } else {
    problems.push_back("dataset.kind: unknown dataset '" + d.kind + "' (digits, roof)");
  }
  r.warn_unknown();
}

}  // namespace detail

/// Top level: "dataset", optional "defaults" (row fields), and "rows", each
/// row overriding the defaults. Without "rows" the top-level row fields form
/// a single row. base resolves relative dataset paths.
inline LoadedConfig parse_config(const Json& doc, const std::filesystem::path& base = ".") {
  LoadedConfig out;
  std::vector<std::string> problems;
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");

  Json defaults = doc.contains("defaults") ? doc["defaults"] : Json::object();
  if (!doc.contains("rows")) {
    for (const auto& [k, v] : doc.items())
      if (k != "dataset" && k != "defaults") defaults[k] = v;
  } else {
    for (const auto& [k, v] : doc.items())
      if (k != "dataset" && k != "defaults" && k != "rows") out.warnings.push_back("unknown field " + k + " ignored");
  }
  if (doc.contains("dataset")) detail::read_dataset(doc["dataset"], base, out.config.dataset, problems, out.warnings);
  else problems.push_back("dataset: missing");

  ExperimentRow proto;
  detail::read_row(defaults, doc.contains("rows") ? "defaults" : "config", proto, problems, out.warnings);
  if (doc.contains("rows")) {
    const auto& rows = doc["rows"];
    if (!rows.is_array() || rows.empty()) problems.push_back("rows must be a non-empty array");
    else
      for (std::size_t i = 0; i < rows.size(); ++i) {
        ExperimentRow row = proto;
        const std::string where = "rows[" + std::to_string(i) + "]";
        detail::read_row(rows[i], where, row, problems, out.warnings);
        out.config.rows.push_back(std::move(row));
      }
  } else {
    out.config.rows.push_back(proto);
  }
  for (std::size_t i = 0; i < out.config.rows.size(); ++i)
    for (const auto& p : row_problems(out.config.rows[i])) problems.push_back("rows[" + std::to_string(i) + "]: " + p);

  if (!problems.empty()) {
    std::string msg = "invalid config (" + std::to_string(problems.size()) + " problem" +
                      (problems.size() > 1 ? "s" : "") + "):";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ValidationError(msg);
  }
  return out;
}

inline LoadedConfig load_config(const std::string& path) {
  return parse_config(read_json(path), std::filesystem::path(path).parent_path());
}

}  // namespace mcae::io
