#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "mcae/nnet/params.hpp"

namespace mcae::io {

using Json = nlohmann::json;

inline constexpr const char* kModelVersion = "mcae-model-v1";

namespace detail {

inline Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline const Json& field(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
  return doc.at(key);
}

inline double number(const Json& v, const std::string& what) {
  if (!v.is_number()) throw SchemaError(what + " is not a number");
  return v.get<double>();
}

inline Matrix matrix_from(const Json& v, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows)
    throw SchemaError(what + ": expected " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& r = v[static_cast<std::size_t>(i)];
    if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != cols)
      throw SchemaError(what + ": row " + std::to_string(i) + " should have " + std::to_string(cols) +
                        " entries");
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = number(r[static_cast<std::size_t>(j)], what + "[" + std::to_string(i) + "]");
  }
  return m;
}

inline Vector vector_from(const Json& v, Eigen::Index n, const std::string& what) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != n)
    throw SchemaError(what + ": expected " + std::to_string(n) + " entries");
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = number(v[static_cast<std::size_t>(i)], what);
  return out;
}

}  // namespace detail

/// Row-major arrays; doubles are written in shortest round-trip form so a
/// reload is bit-exact.
inline Json model_to_json(const McaeModel& m) {
  m.validate();
  return Json{{"version", kModelVersion},
              {"m", m.inputs()},
              {"k", m.hidden()},
              {"hyper",
               {{"lambda", m.hyper.lambda},
                {"rho", m.hyper.rho},
                {"delta", m.hyper.delta},
                {"gamma", m.hyper.gamma},
                {"encoder_decay_per_channel", m.hyper.encoder_decay_per_channel}}},
              {"W_e", detail::matrix_json(m.encoder.W)},
              {"b_e", detail::vector_json(m.encoder.b)},
              {"W_d_left", detail::matrix_json(m.decoder_left.W)},
              {"b_d_left", detail::vector_json(m.decoder_left.b)},
              {"W_d_right", detail::matrix_json(m.decoder_right.W)},
              {"b_d_right", detail::vector_json(m.decoder_right.b)}};
}

inline McaeModel model_from_json(const Json& doc) {
  using detail::field;
  const auto& ver = field(doc, "version");
  if (!ver.is_string() || ver.get<std::string>() != kModelVersion)
    throw SchemaError("unsupported model version " + ver.dump() + " (expected \"" + kModelVersion + "\")");
  const auto& mj = field(doc, "m");
  const auto& kj = field(doc, "k");
  if (!mj.is_number_integer() || !kj.is_number_integer() || mj.get<long>() < 1 || kj.get<long>() < 1)
    throw SchemaError("m and k must be positive integers");
  const Eigen::Index m = mj.get<long>(), k = kj.get<long>();
  McaeModel model;
  const auto& h = field(doc, "hyper");
  model.hyper.lambda = detail::number(field(h, "lambda"), "hyper.lambda");
  model.hyper.rho = detail::number(field(h, "rho"), "hyper.rho");
  model.hyper.delta = detail::number(field(h, "delta"), "hyper.delta");
  model.hyper.gamma = detail::number(field(h, "gamma"), "hyper.gamma");
  if (h.contains("encoder_decay_per_channel")) {
    if (!h["encoder_decay_per_channel"].is_boolean())
      throw SchemaError("hyper.encoder_decay_per_channel is not a boolean");
    model.hyper.encoder_decay_per_channel = h["encoder_decay_per_channel"].get<bool>();
  }
  model.encoder.W = detail::matrix_from(field(doc, "W_e"), k, m, "W_e");
  model.encoder.b = detail::vector_from(field(doc, "b_e"), k, "b_e");
  model.decoder_left.W = detail::matrix_from(field(doc, "W_d_left"), m, k, "W_d_left");
  model.decoder_left.b = detail::vector_from(field(doc, "b_d_left"), m, "b_d_left");
  model.decoder_right.W = detail::matrix_from(field(doc, "W_d_right"), m, k, "W_d_right");
  model.decoder_right.b = detail::vector_from(field(doc, "b_d_right"), m, "b_d_right");
  try {
    model.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(e.what());
  }
  return model;
}

inline Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
  if (!out) throw ParseError("write failed for " + path);
}

inline void write_json(const std::string& path, const Json& doc) { write_text(path, doc.dump(1) + "\n"); }

inline void save_model(const std::string& path, const McaeModel& m) { write_json(path, model_to_json(m)); }
inline McaeModel load_model(const std::string& path) { return model_from_json(read_json(path)); }

}  // namespace mcae::io
