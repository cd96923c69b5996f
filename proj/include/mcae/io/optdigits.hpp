#pragma once

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "mcae/data/labeled.hpp"

namespace mcae::io {

/// UCI optdigits text: 64 counts in 0..16 then the label 0..9, comma
/// separated, one instance per line. Features are scaled by 1/16.
inline LabeledFeatures parse_optdigits(std::istream& in, const std::string& source = "<stream>") {
  std::vector<std::array<int, 65>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<int, 65> row{};
    int field = 0;
    std::size_t pos = 0;
    auto fail = [&](const std::string& why) {
      throw ParseError(source + ":" + std::to_string(lineno) + ": " + why);
    };
    while (true) {
      const auto comma = line.find(',', pos);
      const auto end = comma == std::string::npos ? line.size() : comma;
      if (field >= 65) fail("more than 65 fields");
      int v = 0;
      const char* b = line.data() + pos;
      const char* e = line.data() + end;
      while (b < e && *b == ' ') ++b;
      while (e > b && e[-1] == ' ') --e;
      const auto [p, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || p != e || b == e)
        fail("field " + std::to_string(field + 1) + " is not an integer");
      if (field < 64 && (v < 0 || v > 16))
        fail("field " + std::to_string(field + 1) + " value " + std::to_string(v) + " outside 0..16");
      if (field == 64 && (v < 0 || v > 9)) fail("label " + std::to_string(v) + " outside 0..9");
      row[field++] = v;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (field != 65) fail("expected 65 fields, found " + std::to_string(field));
    rows.push_back(row);
  }
  LabeledFeatures out{Matrix(static_cast<Eigen::Index>(rows.size()), 64), {}, digit_class_names()};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < 64; ++j) out.features(static_cast<Eigen::Index>(i), j) = rows[i][j] / 16.0;
    out.labels.push_back(rows[i][64]);
  }
  return out;
}

inline LabeledFeatures load_optdigits(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return parse_optdigits(in, path);
}

}  // namespace mcae::io
