#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mcae/io/images.hpp"

namespace mcae::io {

inline constexpr const char* kCorpusVersion = "mcae-corpus-v1";

/// One image of an on-disk corpus. meta carries per-role extras such as the
/// paired real file and final Dist for Syn I, or the draw for Syn II.
struct CorpusEntry {
  std::string file;   // relative to the manifest's directory
  std::string label;
  std::string role;   // real | syn1 | syn2
  BinaryImage image;
  std::optional<ControlPointSet> points;
  Json meta = Json::object();
};

struct Corpus {
  std::vector<CorpusEntry> entries;

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& e : entries)
      if (std::find(out.begin(), out.end(), e.label) == out.end()) out.push_back(e.label);
    std::sort(out.begin(), out.end());
    return out;
  }
};

inline bool valid_role(const std::string& r) { return r == "real" || r == "syn1" || r == "syn2"; }

/// Writes every image as a P1 file next to manifest.json in dir.
inline void save_corpus(const std::string& dir, const Corpus& c) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  Json items = Json::array();
  for (const auto& e : c.entries) {
    if (!valid_role(e.role)) throw InvalidArgument("corpus entry has unknown role '" + e.role + "'");
    save_pbm((fs::path(dir) / e.file).string(), e.image);
    Json item{{"file", e.file}, {"class", e.label}, {"role", e.role}};
    if (e.points) item["control_points"] = points_json(*e.points);
    if (!e.meta.empty()) item["meta"] = e.meta;
    items.push_back(std::move(item));
  }
  write_json((fs::path(dir) / "manifest.json").string(), Json{{"version", kCorpusVersion}, {"items", items}});
}

/// Accepts a manifest path or the directory holding manifest.json.
inline Corpus load_corpus(const std::string& path) {
  namespace fs = std::filesystem;
  fs::path manifest = path;
  if (fs::is_directory(manifest)) manifest /= "manifest.json";
  if (!fs::exists(manifest)) throw ParseError("corpus manifest not found: " + manifest.string());
  const auto doc = read_json(manifest.string());
  const auto& ver = detail::field(doc, "version");
  if (!ver.is_string() || ver.get<std::string>() != kCorpusVersion)
    throw SchemaError(manifest.string() + ": unsupported corpus version " + ver.dump());
  const auto& items = detail::field(doc, "items");
  if (!items.is_array()) throw SchemaError(manifest.string() + ": items must be an array");
  Corpus c;
  const auto base = manifest.parent_path();
  for (const auto& it : items) {
    CorpusEntry e;
    const auto& f = detail::field(it, "file");
    const auto& l = detail::field(it, "class");
    const auto& r = detail::field(it, "role");
    if (!f.is_string() || !l.is_string() || !r.is_string())
      throw SchemaError(manifest.string() + ": file, class and role must be strings");
    e.file = f.get<std::string>();
    e.label = l.get<std::string>();
    e.role = r.get<std::string>();
    if (!valid_role(e.role)) throw SchemaError(manifest.string() + ": unknown role '" + e.role + "'");
    e.image = load_pnm((base / e.file).string());
    if (it.contains("control_points")) e.points = points_from_json(it["control_points"]);
    if (it.contains("meta")) e.meta = it["meta"];
    c.entries.push_back(std::move(e));
  }
  return c;
}

}  // namespace mcae::io
