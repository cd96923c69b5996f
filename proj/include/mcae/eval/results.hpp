#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace mcae {

struct ResultRow {
  std::string ae_variant;
  std::string ae_train_config;
  std::string feature_type;
  std::string classifier_data_mix;
  double macro_f1 = 0.0;
  std::vector<double> per_class_f1s;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string join_f1s(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + fixed6(v[i]);
  return out;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace detail

struct ResultsTable {
  std::vector<ResultRow> rows;

  static std::vector<std::string> columns() {
    return {"ae_variant", "ae_train_config", "feature_type", "classifier_data_mix",
            "macro_f1",   "per_class_f1s",   "seed"};
  }

  std::vector<std::string> cells(const ResultRow& r) const {
    return {r.ae_variant, r.ae_train_config, r.feature_type, r.classifier_data_mix,
            detail::fixed6(r.macro_f1), detail::join_f1s(r.per_class_f1s), std::to_string(r.seed)};
  }

  std::string to_csv() const {
    std::ostringstream out;
    const auto cols = columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : rows) {
      const auto c = cells(r);
      for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << detail::csv_field(c[i]);
      out << '\n';
    }
    return out.str();
  }

  /// Space-aligned columns; per-class scores are left out to keep lines short.
  std::string to_text() const {
    std::vector<std::vector<std::string>> grid;
    auto cols = columns();
    cols.erase(cols.begin() + 5);
    grid.push_back(cols);
    for (const auto& r : rows) {
      auto c = cells(r);
      c.erase(c.begin() + 5);
      grid.push_back(c);
    }
    std::vector<std::size_t> width(cols.size(), 0);
    for (const auto& line : grid)
      for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
    std::ostringstream out;
    for (const auto& line : grid) {
      for (std::size_t i = 0; i < line.size(); ++i) {
        out << line[i];
        if (i + 1 < line.size()) out << std::string(width[i] - line[i].size() + 2, ' ');
      }
      out << '\n';
    }
    return out.str();
  }
};

}  // namespace mcae
