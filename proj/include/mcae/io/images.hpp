#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mcae/io/model_io.hpp"
#include "mcae/synth/control_points.hpp"

namespace mcae::io {

// Plain portable maps: P1 for binary images (1 = black = foreground), P2 for
// gray images with maxval 255.

inline std::string to_pbm(const BinaryImage& img) {
  std::ostringstream out;
  out << "P1\n" << img.width() << ' ' << img.height() << '\n';
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out << (x ? " " : "") << (img.at(x, y) ? 1 : 0);
    out << '\n';
  }
  return out.str();
}

inline std::string to_pgm(const GrayImage& img) {
  std::ostringstream out;
  out << "P2\n" << img.width() << ' ' << img.height() << "\n255\n";
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x)
      out << (x ? " " : "") << std::lround(std::clamp(img.at(x, y), 0.0, 1.0) * 255.0);
    out << '\n';
  }
  return out.str();
}

namespace detail {

/// Whitespace-separated tokens with '#' comments removed.
inline std::vector<std::string> pnm_tokens(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) out.push_back(t);
  }
  return out;
}

inline int pnm_int(const std::string& t, const std::string& source) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != t.size() || v < 0) throw ParseError(source + ": bad value '" + t + "'");
  return v;
}

}  // namespace detail

/// Reads P1 or P2; gray images are thresholded at half of maxval.
inline BinaryImage parse_pnm(std::istream& in, const std::string& source = "<stream>") {
  const auto tok = detail::pnm_tokens(in);
  if (tok.empty() || (tok[0] != "P1" && tok[0] != "P2"))
    throw ParseError(source + ": not a plain PBM/PGM (expected P1 or P2)");
  const bool gray = tok[0] == "P2";
  const std::size_t header = gray ? 4 : 3;
  if (tok.size() < header) throw ParseError(source + ": truncated header");
  const int w = detail::pnm_int(tok[1], source), h = detail::pnm_int(tok[2], source);
  const int maxval = gray ? detail::pnm_int(tok[3], source) : 1;
  if (maxval < 1) throw ParseError(source + ": maxval must be >= 1");
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (tok.size() - header != need)
    throw ParseError(source + ": expected " + std::to_string(need) + " pixels, found " +
                     std::to_string(tok.size() - header));
  BinaryImage img(w, h, 0);
  for (std::size_t i = 0; i < need; ++i) {
    const int v = detail::pnm_int(tok[header + i], source);
    if (v > maxval) throw ParseError(source + ": pixel value " + std::to_string(v) + " above maxval");
    img[i] = gray ? (2 * v > maxval ? 1 : 0) : static_cast<std::uint8_t>(v);
  }
  return img;
}

inline BinaryImage load_pnm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return parse_pnm(in, path);
}

inline void save_pbm(const std::string& path, const BinaryImage& img) { write_text(path, to_pbm(img)); }

// PrototypeSpec / control point sets as JSON.

inline Json points_json(const ControlPointSet& s) {
  Json pts = Json::array();
  for (const auto& p : s.points) {
    Json q{{"x", p.x}, {"y", p.y}, {"constraint", to_string(p.constraint)}};
    if (p.constraint == Constraint::Region)
      q["region"] = Json::array({p.region.x0, p.region.y0, p.region.x1, p.region.y1});
    pts.push_back(std::move(q));
  }
  Json edges = Json::array();
  for (const auto& [a, b] : s.edges) edges.push_back(Json::array({a, b}));
  return Json{{"points", pts}, {"edges", edges}};
}

inline ControlPointSet points_from_json(const Json& doc) {
  ControlPointSet s;
  const auto& pts = detail::field(doc, "points");
  const auto& edges = detail::field(doc, "edges");
  if (!pts.is_array() || !edges.is_array()) throw SchemaError("points and edges must be arrays");
  for (const auto& q : pts) {
    ControlPoint p;
    p.x = detail::number(detail::field(q, "x"), "point x");
    p.y = detail::number(detail::field(q, "y"), "point y");
    if (q.contains("constraint")) {
      try {
        p.constraint = constraint_from_string(q["constraint"].get<std::string>());
      } catch (const std::exception& e) {
        throw SchemaError(e.what());
      }
    }
    if (p.constraint == Constraint::Region) {
      const auto& r = detail::field(q, "region");
      if (!r.is_array() || r.size() != 4) throw SchemaError("region must be [x0, y0, x1, y1]");
      p.region = {r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>()};
    }
    s.points.push_back(p);
  }
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw SchemaError("edge must be a pair of point indices");
    s.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(e.what());
  }
  return s;
}

inline Json prototype_to_json(const PrototypeSpec& p) {
  Json doc = points_json(p.initial);
  doc["class"] = p.class_label;
  doc["width"] = p.width;
  doc["height"] = p.height;
  return doc;
}

inline PrototypeSpec prototype_from_json(const Json& doc) {
  PrototypeSpec p;
  const auto& c = detail::field(doc, "class");
  if (!c.is_string()) throw SchemaError("class must be a string");
  p.class_label = c.get<std::string>();
  const auto& w = detail::field(doc, "width");
  const auto& h = detail::field(doc, "height");
  if (!w.is_number_integer() || !h.is_number_integer() || w.get<int>() < 1 || h.get<int>() < 1)
    throw SchemaError("width and height must be positive integers");
  p.width = w.get<int>();
  p.height = h.get<int>();
  p.initial = points_from_json(doc);
  return p;
}

inline void save_prototype(const std::string& path, const PrototypeSpec& p) {
  write_json(path, prototype_to_json(p));
}
inline PrototypeSpec load_prototype(const std::string& path) { return prototype_from_json(read_json(path)); }

}  // namespace mcae::io
