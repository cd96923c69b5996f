// mcae: command line front end for the synthetic-data / multichannel
// autoencoder pipeline.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "mcae/data/corpus.hpp"
#include "mcae/eval/experiment.hpp"
#include "mcae/eval/gap.hpp"
#include "mcae/io/config.hpp"
#include "mcae/io/corpus_io.hpp"
#include "mcae/io/model_io.hpp"
#include "mcae/nnet/gradcheck.hpp"

using namespace mcae;
namespace fs = std::filesystem;

namespace {

/// Bad flags or inputs; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

std::string numbered(const char* prefix, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%05zu.pbm", prefix, i);
  return buf;
}

void require_file(const std::string& path, const char* what) {
  if (!fs::exists(path)) throw UsageError(std::string(what) + " not found: " + path);
}

bool is_manifest(const std::string& path) {
  return fs::is_directory(path) || fs::path(path).extension() == ".json";
}

/// A corpus directory/manifest, or a UCI optdigits file (upsampled to 32x32).
io::Corpus read_images(const std::string& path, const std::string& role = "real") {
  require_file(path, "corpus");
  if (is_manifest(path)) return io::load_corpus(path);
  const auto d = io::load_optdigits(path);
  io::Corpus c;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    c.entries.push_back({numbered(role.c_str(), static_cast<std::size_t>(i)),
                         d.class_names[static_cast<std::size_t>(d.labels[static_cast<std::size_t>(i)])], role,
                         upsample_digit(d.features.row(i).transpose()), std::nullopt, io::Json::object()});
  return c;
}

Matrix corpus_features(const io::Corpus& c, Eigen::Index expect) {
  Matrix x(static_cast<Eigen::Index>(c.entries.size()), expect);
  for (std::size_t i = 0; i < c.entries.size(); ++i) {
    const auto& img = c.entries[i].image;
    if (img.width() % kDigitBlock || img.height() % kDigitBlock)
      throw UsageError(c.entries[i].file + ": image size not a multiple of " + std::to_string(kDigitBlock));
    const auto f = block_means(img, kDigitBlock);
    if (static_cast<Eigen::Index>(f.size()) != expect)
      throw UsageError(c.entries[i].file + ": " + std::to_string(f.size()) + " features, model expects " +
                       std::to_string(expect));
    x.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vector>(f.data(), expect).transpose();
  }
  return x;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") std::cout << text;
  else io::write_text(out, text);
}

McaeModel read_model(const std::string& path) {
  require_file(path, "model");
  return io::load_model(path);
}

// ---------------------------------------------------------------- commands

struct GenPrototype {
  std::string digits, roof, label, out;
  int points = 24, per_class = 20;

  void run() const {
    PrototypeSpec spec;
    if (!roof.empty()) {
      try {
        spec = roof_prototype(roof);
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
    } else {
      const auto c = read_images(digits);
      auto labels = c.labels();
      std::string cls = label;
      if (cls.empty()) {
        if (labels.size() != 1) throw UsageError("--class is required when the corpus has several classes");
        cls = labels[0];
      }
      std::vector<BinaryImage> imgs;
      for (const auto& e : c.entries)
        if (e.label == cls && (per_class <= 0 || static_cast<int>(imgs.size()) < per_class))
          imgs.push_back(e.image);
      if (imgs.size() < 2) throw UsageError("class '" + cls + "' needs at least 2 images to congeal");
      const auto res = congeal(imgs);
      spec = {cls, imgs[0].width(), imgs[0].height(), sample_boundary_points(res.prototype, points)};
    }
    const auto text = io::prototype_to_json(spec).dump(1) + "\n";
    emit(out, text);
    if (!out.empty() && out != "-") std::cout << out << '\n';
  }
};

struct GenRoofs {
  std::vector<std::string> styles{"gable"};
  int count = 10, clutter = 0;
  double jitter = 2.0;
  std::uint64_t seed = 1;
  std::string out;

  void run() const {
    std::vector<PrototypeSpec> specs;
    for (const auto& s : styles) try {
        specs.push_back(roof_prototype(s));
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
    if (count < 0 || clutter < 0 || jitter < 0) throw UsageError("count, clutter and jitter must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> px(0, kRoofCanvas - 1);
    io::Corpus c;
    for (const auto& spec : specs)
      for (int i = 0; i < count; ++i) {
        const auto truth = jitter_points(spec, jitter, rng);
        auto img = render(truth, spec.width, spec.height);
        for (int k = 0; k < clutter; ++k) img.at(px(rng), px(rng)) = 1;
        c.entries.push_back({numbered("real", c.entries.size()), spec.class_label, "real", img, truth,
                             io::Json::object()});
      }
    io::save_corpus(out, c);
    std::cout << (fs::path(out) / "manifest.json").string() << '\n';
  }
};

struct GenSyn1 {
  std::string real, method = "match", out;
  std::vector<std::string> protos;
  int steps = 10, max_sweeps = 100;
  bool no_compound = false;

  void run() const {
    if (method != "match" && method != "migrate") throw UsageError("--method must be match or migrate");
    std::map<std::string, PrototypeSpec> specs;
    for (const auto& p : protos) {
      require_file(p, "prototype");
      auto s = io::load_prototype(p);
      specs[s.class_label] = std::move(s);
    }
    const auto in = read_images(real);
    io::Corpus c;
    MatchOptions mo;
    mo.max_sweeps = max_sweeps;
    mo.compound_moves = !no_compound;
    std::size_t k = 0;
    for (const auto& e : in.entries) {
      if (e.role != "real") continue;
      const auto it = specs.find(e.label);
      if (it == specs.end()) throw UsageError("no prototype for class '" + e.label + "'");
      const auto& spec = it->second;
      if (!e.image.same_size(spec.width, spec.height))
        throw UsageError(e.file + ": image size differs from the '" + e.label + "' prototype canvas");
      io::CorpusEntry real_copy{e.file, e.label, "real", e.image, std::nullopt, io::Json::object()};
      io::CorpusEntry syn{numbered("syn1", k++), e.label, "syn1", {}, {}, {{"pair", e.file}, {"method", method}}};
      if (method == "match") {
        auto m = match_synthetic(e.image, spec, mo);
        syn.meta["initial_dist"] = m.initial_distance;
        syn.meta["sweeps"] = m.sweeps;
        syn.meta["converged"] = m.converged;
        syn.points = std::move(m.points);
      } else {
        syn.points = migrate_control_points(e.image, render(spec), spec.initial, steps).points;
      }
      syn.image = render(*syn.points, spec.width, spec.height);
      syn.meta["dist"] = image_distance(syn.image, e.image);
      c.entries.push_back(std::move(real_copy));
      c.entries.push_back(std::move(syn));
    }
    io::save_corpus(out, c);
    std::cout << (fs::path(out) / "manifest.json").string() << '\n';
  }
};

struct GenSyn2 {
  std::string syn1, out;
  int per_class = 100;
  std::uint64_t seed = 1;

  void run() const {
    if (per_class < 0) throw UsageError("--per-class must be >= 0");
    const auto in = read_images(syn1);
    std::vector<std::pair<std::string, ControlPointSet>> sets;
    int w = 0, h = 0;
    for (const auto& e : in.entries) {
      if (e.role != "syn1") continue;
      if (!e.points) throw UsageError(e.file + ": Syn I entry has no control points");
      sets.emplace_back(e.label, *e.points);
      w = e.image.width(), h = e.image.height();
    }
    const auto res = generate_syn2(sets, per_class, seed, w, h);
    for (const auto& m : res.warnings) warn(m);
    io::Corpus c;
    for (const auto& item : res.items)
      c.entries.push_back({numbered("syn2", c.entries.size()), item.label, "syn2", item.image, item.points,
                           io::Json{{"first", item.draw.first},
                                    {"second", item.draw.second},
                                    {"mode", to_string(item.draw.mode)},
                                    {"weight", item.draw.weight}}});
    io::save_corpus(out, c);
    std::cout << (fs::path(out) / "manifest.json").string() << '\n';
  }
};

io::LoadedConfig read_config(const std::string& path) {
  require_file(path, "config");
  try {
    auto c = io::load_config(path);
    for (const auto& w : c.warnings) warn(w);
    return c;
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
}

struct Train {
  std::string config, out = "model.json", trace = "trace.csv";
  int row = 0;

  void run() const {
    const auto cfg = read_config(config).config;
    if (row < 0 || row >= static_cast<int>(cfg.rows.size()))
      throw UsageError("--row " + std::to_string(row) + " out of range (config has " +
                       std::to_string(cfg.rows.size()) + " rows)");
    const auto& r = cfg.rows[static_cast<std::size_t>(row)];
    if (r.variant == AeVariant::Identity) throw UsageError("identity rows have no model to train");
    ExperimentData data;
    try {
      data = build_data(cfg.dataset);
    } catch (const std::exception& e) {
      throw StageError("dataset", e.what());
    }
    for (const auto& w : data.warnings) warn(w);
    TrainResult res;
    try {
      res = train_autoencoder(data, r);
    } catch (const std::exception& e) {
      throw StageError("autoencoder", e.what());
    }
    io::save_model(out, res.model);
    std::string csv = "iteration,E,J_left,J_right,grad_norm\n";
    char buf[160];
    for (const auto& t : res.trace.rows) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", t.iteration, t.E, t.J_left, t.J_right,
                    t.grad_norm);
      csv += buf;
    }
    io::write_text(trace, csv);
    std::cerr << "stopped: " << res.trace.stop_reason << " after " << res.trace.rows.size() << " iterations\n";
    std::cout << out << '\n' << trace << '\n';
  }
};

struct Encode {
  std::string model, corpus, out;

  void run() const {
    const auto m = read_model(model);
    const auto c = read_images(corpus);
    const Matrix h = encode(m.encoder, corpus_features(c, m.inputs()));
    std::string csv = "id,file,role,class";
    for (Eigen::Index j = 0; j < h.cols(); ++j) csv += ",h_" + std::to_string(j + 1);
    csv += '\n';
    for (std::size_t i = 0; i < c.entries.size(); ++i) {
      const auto& e = c.entries[i];
      csv += std::to_string(i) + "," + detail::csv_field(e.file) + "," + e.role + "," + detail::csv_field(e.label);
      for (Eigen::Index j = 0; j < h.cols(); ++j) csv += "," + detail::fixed6(h(static_cast<Eigen::Index>(i), j));
      csv += '\n';
    }
    emit(out, csv);
  }
};

struct Reconstruct {
  std::string model, corpus, channel = "right", out;

  void run() const {
    if (channel != "left" && channel != "right") throw UsageError("--channel must be left or right");
    const auto m = read_model(model);
    if (m.inputs() != 64) throw UsageError("reconstruct writes 32x32 bitmaps and needs a 64-input model");
    const auto c = read_images(corpus);
    const Matrix y = reconstruct(m, corpus_features(c, 64), channel == "left");
    io::Corpus o;
    for (std::size_t i = 0; i < c.entries.size(); ++i) {
      const auto& e = c.entries[i];
      o.entries.push_back({numbered("recon", i), e.label, e.role,
                           upsample_digit(y.row(static_cast<Eigen::Index>(i)).transpose()), std::nullopt,
                           io::Json{{"source", e.file}, {"channel", channel}}});
    }
    io::save_corpus(out, o);
    std::cout << (fs::path(out) / "manifest.json").string() << '\n';
  }
};

struct Eval {
  std::string config, out;

  void run() const {
    const auto cfg = read_config(config).config;
    const auto table = run_experiment(cfg);
    if (!out.empty()) {
      io::write_text(out + ".csv", table.to_csv());
      io::write_text(out + ".txt", table.to_text());
      std::cerr << "wrote " << out << ".csv and " << out << ".txt\n";
    }
    std::cout << table.to_text();
  }
};

struct GradCheck {
  std::uint64_t seed = 1;
  std::string sizes = "5,4,6";

  int run() const {
    int m = 0, k = 0, n = 0;
    char tail = 0;
    if (std::sscanf(sizes.c_str(), "%d,%d,%d%c", &m, &k, &n, &tail) != 3 || m < 1 || k < 1 || n < 1)
      throw UsageError("--sizes expects three positive integers m,k,n");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> nd(0.0, 0.5);
    auto unit = [&](int r, int cols) { return Matrix(Matrix::NullaryExpr(r, cols, [&] { return u(rng); })); };
    auto normal = [&](int r, int cols) { return Matrix(Matrix::NullaryExpr(r, cols, [&] { return nd(rng); })); };
    const Hyper h{0.01, 0.5, 0.2, 1.0};
    McaeModel model{{normal(k, m), normal(k, 1)}, {normal(m, k), normal(m, 1)}, {normal(m, k), normal(m, 1)}, h};
    const ChannelTask left{unit(n, m), unit(n, m)}, right{unit(n, m), unit(n, m)};
    const auto rep = check_mcae_gradients(model, left, right);
    const bool ok = rep.max_rel_error < 1e-6;
    std::cout << io::Json{{"m", m},
                          {"k", k},
                          {"n", n},
                          {"seed", seed},
                          {"parameters", rep.parameters},
                          {"max_rel_error", rep.max_rel_error},
                          {"max_abs_error", rep.max_abs_error},
                          {"pass", ok}}
                     .dump()
              << '\n';
    return ok ? 0 : 1;
  }
};

struct Correlate {
  std::string model, pairs, sae_syn_real, sae_real_real, out = "gap";

  void run() const {
    const auto m = read_model(model);
    std::optional<McaeModel> s1, s2;
    if (!sae_syn_real.empty()) s1 = read_model(sae_syn_real);
    if (!sae_real_real.empty()) s2 = read_model(sae_real_real);
    const auto c = read_images(pairs);
    std::map<std::string, std::size_t> real_index;
    for (std::size_t i = 0; i < c.entries.size(); ++i)
      if (c.entries[i].role == "real") real_index[c.entries[i].file] = i;
    io::Corpus reals, syns;
    std::vector<std::string> classes;
    for (const auto& e : c.entries) {
      if (e.role != "syn1") continue;
      const auto pair = e.meta.contains("pair") ? e.meta["pair"].get<std::string>() : "";
      const auto it = real_index.find(pair);
      if (it == real_index.end()) throw UsageError(e.file + ": paired real image '" + pair + "' not in manifest");
      reals.entries.push_back(c.entries[it->second]);
      syns.entries.push_back(e);
      classes.push_back(e.label);
    }
    if (syns.entries.empty()) throw UsageError("manifest has no Syn I pairs");
    const Matrix xr = corpus_features(reals, m.inputs()), xs = corpus_features(syns, m.inputs());
    const auto rep = gap_report(xr, xs, m, s1, s2);
    io::write_text(out + "_gap.csv", rep.to_csv());
    io::write_text(out + "_embeddings.csv", embeddings_csv(m, xr, xs, classes));
    for (const auto& cond : rep.conditions)
      std::cerr << cond.name << " mean correlation " << detail::fixed6(cond.mean) << '\n';
    std::cout << out << "_gap.csv\n" << out << "_embeddings.csv\n";
  }
};

struct ImportDigits {
  std::string input, out;
  int count = 0;

  void run() const {
    require_file(input, "digits file");
    auto c = read_images(input);
    if (count > 0 && static_cast<std::size_t>(count) < c.entries.size()) c.entries.resize(static_cast<std::size_t>(count));
    io::save_corpus(out, c);
    std::cout << (fs::path(out) / "manifest.json").string() << '\n';
  }
};

void error_json(const char* kind, const std::string& msg) {
  std::cerr << io::Json{{"error", kind}, {"message", msg}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mcae: synthetic image generation and multichannel autoencoder experiments"};
  app.require_subcommand(1);

  GenPrototype gp;
  auto* c_gp = app.add_subcommand("gen-prototype", "Build a prototype control-point spec");
  auto* o_digits = c_gp->add_option("--digits", gp.digits, "Digit corpus (manifest or optdigits file) to congeal");
  auto* o_roof = c_gp->add_option("--roof", gp.roof, "Built-in roof style: gable, hip or pyramid");
  o_digits->excludes(o_roof);
  c_gp->add_option("--class", gp.label, "Class to congeal (digits)");
  c_gp->add_option("--points", gp.points, "Boundary control points (digits)")->capture_default_str();
  c_gp->add_option("--per-class", gp.per_class, "Images congealed, first ones in order; 0 = all")
      ->capture_default_str();
  c_gp->add_option("-o,--out", gp.out, "Output JSON (default stdout)");
  c_gp->callback([&] {
    if (gp.digits.empty() && gp.roof.empty()) throw CLI::ValidationError("--digits or --roof is required");
  });

  GenRoofs gr;
  auto* c_gr = app.add_subcommand("gen-roofs", "Render a jittered toy roof corpus");
  c_gr->add_option("--style", gr.styles, "Roof styles")->capture_default_str();
  c_gr->add_option("--count", gr.count, "Images per style")->capture_default_str();
  c_gr->add_option("--jitter", gr.jitter, "Max offset per coordinate, pixels")->capture_default_str();
  c_gr->add_option("--clutter", gr.clutter, "Stray foreground pixels per image")->capture_default_str();
  c_gr->add_option("--seed", gr.seed)->capture_default_str();
  c_gr->add_option("-o,--out", gr.out, "Output corpus directory")->required();

  GenSyn1 s1;
  auto* c_s1 = app.add_subcommand("gen-syn1", "Match one synthetic image to each real image");
  c_s1->add_option("--real", s1.real, "Real corpus (manifest or optdigits file)")->required();
  c_s1->add_option("--proto", s1.protos, "Prototype spec, one per class")->required();
  c_s1->add_option("--method", s1.method, "match (coordinate descent) or migrate (distance-field morph)")
      ->capture_default_str();
  c_s1->add_option("--steps", s1.steps, "Migration steps")->capture_default_str();
  c_s1->add_option("--max-sweeps", s1.max_sweeps, "Coordinate descent sweep cap")->capture_default_str();
  c_s1->add_flag("--no-compound", s1.no_compound, "Disable the diagonal/edge moves tried at a plateau");
  c_s1->add_option("-o,--out", s1.out, "Output corpus directory")->required();

  GenSyn2 s2;
  auto* c_s2 = app.add_subcommand("gen-syn2", "Interpolate/extrapolate Syn I control points");
  c_s2->add_option("--syn1", s2.syn1, "Syn I corpus")->required();
  c_s2->add_option("--per-class", s2.per_class, "Images per class")->capture_default_str();
  c_s2->add_option("--seed", s2.seed)->capture_default_str();
  c_s2->add_option("-o,--out", s2.out, "Output corpus directory")->required();

  Train tr;
  auto* c_tr = app.add_subcommand("train", "Train the autoencoder of one config row");
  c_tr->add_option("--config", tr.config, "Experiment config JSON")->required();
  c_tr->add_option("--row", tr.row, "Row index")->capture_default_str();
  c_tr->add_option("-o,--out", tr.out, "Model JSON")->capture_default_str();
  c_tr->add_option("--trace", tr.trace, "Training trace CSV")->capture_default_str();

  Encode en;
  auto* c_en = app.add_subcommand("encode", "Hidden-layer features of a corpus");
  c_en->add_option("--model", en.model)->required();
  c_en->add_option("--corpus", en.corpus)->required();
  c_en->add_option("-o,--out", en.out, "Features CSV (default stdout)");

  Reconstruct rc;
  auto* c_rc = app.add_subcommand("reconstruct", "Decode a corpus through one channel");
  c_rc->add_option("--model", rc.model)->required();
  c_rc->add_option("--corpus", rc.corpus)->required();
  c_rc->add_option("--channel", rc.channel, "left or right decoder")->capture_default_str();
  c_rc->add_option("-o,--out", rc.out, "Output corpus directory")->required();

  Eval ev;
  auto* c_ev = app.add_subcommand("eval", "Run every row of a config and print the results table");
  c_ev->add_option("--config", ev.config)->required();
  c_ev->add_option("-o,--out", ev.out, "Write <out>.csv and <out>.txt");

  GradCheck gc;
  auto* c_gc = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
  c_gc->add_option("--seed", gc.seed)->capture_default_str();
  c_gc->add_option("--sizes", gc.sizes, "m,k,n")->capture_default_str();

  Correlate co;
  auto* c_co = app.add_subcommand("correlate", "Correlation of matched real/Syn I pairs");
  c_co->add_option("--model", co.model, "MCAE model")->required();
  c_co->add_option("--pairs", co.pairs, "Syn I corpus with its paired real images")->required();
  c_co->add_option("--sae-syn-real", co.sae_syn_real, "Single-channel model trained on <syn, real>");
  c_co->add_option("--sae-real-real", co.sae_real_real, "Single-channel model trained on <real, real>");
  c_co->add_option("-o,--out", co.out, "Output prefix")->capture_default_str();

  ImportDigits im;
  auto* c_im = app.add_subcommand("import-digits", "Convert a UCI optdigits file to a bitmap corpus");
  c_im->add_option("--input", im.input)->required();
  c_im->add_option("--count", im.count, "Keep the first N instances; 0 = all")->capture_default_str();
  c_im->add_option("-o,--out", im.out, "Output corpus directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const UsageError& e) {
    error_json("usage", e.what());
    return 2;
  }

  try {
    if (*c_gp) gp.run();
    else if (*c_gr) gr.run();
    else if (*c_s1) s1.run();
    else if (*c_s2) s2.run();
    else if (*c_tr) tr.run();
    else if (*c_en) en.run();
    else if (*c_rc) rc.run();
    else if (*c_ev) ev.run();
    else if (*c_gc) return gc.run();
    else if (*c_co) co.run();
    else if (*c_im) im.run();
  } catch (const UsageError& e) {
    error_json("usage", e.what());
    return 2;
  } catch (const ValidationError& e) {
    error_json("validation", e.what());
    return 2;
  } catch (const SchemaError& e) {
    error_json("schema", e.what());
    return 2;
  } catch (const ParseError& e) {
    error_json("parse", e.what());
    return 2;
  } catch (const StageError& e) {
    error_json("stage", e.what());
    return e.stage() == "config" ? 2 : 1;
  } catch (const std::exception& e) {
    error_json("runtime", e.what());
    return 1;
  }
  return 0;
}
