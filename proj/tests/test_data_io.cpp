#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>

#include "mcae/io/config.hpp"
#include "mcae/io/corpus_io.hpp"
#include "mcae/io/model_io.hpp"
#include "mcae/io/optdigits.hpp"
#include "mcae/synth/roof.hpp"
#include "support.hpp"

using namespace mcae;
namespace fs = std::filesystem;

namespace {

std::string digit_line(int label, int fill = 3) {
  std::string s;
  for (int i = 0; i < 64; ++i) s += std::to_string(i == 10 ? 16 : fill) + ",";
  return s + std::to_string(label);
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("mcae_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

io::LoadedConfig parse(const std::string& text) { return io::parse_config(io::Json::parse(text), MCAE_SOURCE_DIR); }

}  // namespace

TEST(Optdigits, ScalesAndLabels) {
  std::istringstream in(digit_line(7) + "\n" + digit_line(0, 0) + "\n");
  const auto d = io::parse_optdigits(in);
  ASSERT_EQ(d.size(), 2);
  EXPECT_EQ(d.features.cols(), 64);
  EXPECT_DOUBLE_EQ(d.features.row(0).maxCoeff(), 1.0);
  EXPECT_DOUBLE_EQ(d.features(0, 0), 3.0 / 16.0);
  EXPECT_EQ(d.labels, (std::vector<int>{7, 0}));
  EXPECT_EQ(d.num_classes(), 10);
}

TEST(Optdigits, ShortLineNamesLine) {
  auto line = digit_line(1);
  line = line.substr(line.find(',') + 1);  // 64 fields
  std::istringstream in(digit_line(2) + "\n" + line + "\n");
  try {
    io::parse_optdigits(in, "f.tra");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("f.tra:2"), std::string::npos) << e.what();
  }
}

TEST(Optdigits, RejectsOutOfRange) {
  std::string bad = digit_line(3);
  bad.replace(0, 1, "17");
  std::istringstream a(bad);
  EXPECT_THROW(io::parse_optdigits(a), ParseError);
  std::string lab = digit_line(3);
  lab.back() = 'x';
  std::istringstream b(lab);
  EXPECT_THROW(io::parse_optdigits(b), ParseError);
  std::istringstream c(digit_line(3) + ",4");
  EXPECT_THROW(io::parse_optdigits(c), ParseError);
  EXPECT_THROW(io::load_optdigits("/nonexistent/file"), ParseError);
}

TEST(Optdigits, BundledFileLoads) {
  const auto d = io::load_optdigits(std::string(MCAE_SOURCE_DIR) + "/data/optdigits.tes");
  EXPECT_EQ(d.size(), 1797);
  EXPECT_GE(d.features.minCoeff(), 0.0);
  EXPECT_LE(d.features.maxCoeff(), 1.0);
}

// needs the full UCI download: MCAE_OPTDIGITS_DIR with optdigits.tra and optdigits.tes
TEST(Optdigits, FullCorpusHas5620) {
  const char* dir = std::getenv("MCAE_OPTDIGITS_DIR");
  if (!dir) GTEST_SKIP() << "MCAE_OPTDIGITS_DIR not set";
  const std::string base(dir);
  if (!std::filesystem::exists(base + "/optdigits.tra")) GTEST_SKIP() << "no optdigits.tra in " << base;
  const auto tra = io::load_optdigits(base + "/optdigits.tra");
  const auto tes = io::load_optdigits(base + "/optdigits.tes");
  EXPECT_EQ(tra.size(), 3823);
  EXPECT_EQ(tra.size() + tes.size(), 5620);
}

TEST(ModelIo, RoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 5; ++t) {
    Hyper h{1e-4 * (t + 1) / 3.0, 0.1 / 7.0, 0.05, 1.0 / 3.0, t % 2 == 0};
    const auto m = mcae::testing::random_model(7, 3 + t, h, rng);
    const auto back = io::model_from_json(io::Json::parse(io::model_to_json(m).dump()));
    EXPECT_TRUE(bit_equal(m.encoder.W, back.encoder.W));
    EXPECT_TRUE(bit_equal(m.encoder.b, back.encoder.b));
    EXPECT_TRUE(bit_equal(m.decoder_left.W, back.decoder_left.W));
    EXPECT_TRUE(bit_equal(m.decoder_right.b, back.decoder_right.b));
    EXPECT_TRUE(m == back);
  }
}

TEST(ModelIo, FileRoundTrip) {
  const auto dir = scratch("model");
  const auto m = make_model(5, 4, Hyper{}, 3);
  io::save_model((dir / "m.json").string(), m);
  EXPECT_TRUE(io::load_model((dir / "m.json").string()) == m);
  fs::remove_all(dir);
}

TEST(ModelIo, SchemaErrors) {
  const auto m = make_model(3, 2, Hyper{}, 1);
  auto doc = io::model_to_json(m);
  auto tampered = doc;
  tampered["W_e"][0].push_back(0.5);
  EXPECT_THROW(io::model_from_json(tampered), SchemaError);
  auto unversioned = doc;
  unversioned.erase("version");
  EXPECT_THROW(io::model_from_json(unversioned), SchemaError);
  auto wrong = doc;
  wrong["version"] = "mcae-model-v0";
  EXPECT_THROW(io::model_from_json(wrong), SchemaError);
  auto badk = doc;
  badk["k"] = 5;
  EXPECT_THROW(io::model_from_json(badk), SchemaError);
  auto badval = doc;
  badval["b_e"][0] = "x";
  EXPECT_THROW(io::model_from_json(badval), SchemaError);
}

TEST(Config, MinimalGetsDefaults) {
  const auto c = parse(R"({"dataset": {"kind": "digits", "train": "data/optdigits.tes"}})");
  EXPECT_TRUE(c.warnings.empty());
  ASSERT_EQ(c.config.rows.size(), 1u);
  const auto& r = c.config.rows[0];
  EXPECT_EQ(r.variant, AeVariant::Mcae);
  EXPECT_EQ(r.channels, (std::vector<ChannelSpec>{{"syn1", "real"}, {"real", "real"}}));
  EXPECT_EQ(r.hyper, Hyper{});
  EXPECT_EQ(r.train.max_iters, 400);
  EXPECT_DOUBLE_EQ(r.train.tol, 1e-6);
  EXPECT_EQ(r.hidden, 100);
  EXPECT_EQ(c.config.dataset.digits.train_count, 1000);
  EXPECT_EQ(c.config.dataset.digits.prototypes.points, 24);
  EXPECT_TRUE(fs::exists(c.config.dataset.digits.train_path));
}

TEST(Config, RowsOverrideDefaults) {
  const auto c = parse(R"({
    "dataset": {"kind": "roof", "train_per_style": 5, "test_per_style": 5},
    "defaults": {"hidden": 12, "hyper": {"gamma": 0.5}, "seed": 4},
    "rows": [{"ae_variant": "sae"},
             {"ae_variant": "ciae", "feature_type": "reconstructed", "data_mix": "real"},
             {"hidden": 8, "channels": [["syn1", "real"], {"input": "real", "target": "real"}]}]})");
  ASSERT_EQ(c.config.rows.size(), 3u);
  EXPECT_EQ(c.config.rows[0].variant, AeVariant::Sae);
  EXPECT_EQ(c.config.rows[0].channels, (std::vector<ChannelSpec>{{"real", "real"}}));
  EXPECT_EQ(c.config.rows[0].hidden, 12);
  EXPECT_DOUBLE_EQ(c.config.rows[0].hyper.gamma, 0.5);
  EXPECT_EQ(c.config.rows[0].seed, 4u);
  EXPECT_EQ(c.config.rows[1].channels, (std::vector<ChannelSpec>{{"syn1+real", "real+real"}}));
  EXPECT_EQ(c.config.rows[1].mix, DataMix::Real);
  EXPECT_EQ(c.config.rows[2].hidden, 8);
  EXPECT_EQ(c.config.dataset.kind, "roof");
}

TEST(Config, McaeWithOneChannelRejected) {
  EXPECT_THROW(parse(R"({"dataset": {"kind": "roof"}, "channels": [["real", "real"]]})"), ValidationError);
}

TEST(Config, AllProblemsListedAtOnce) {
  try {
    parse(R"({"dataset": {"kind": "digits", "train": "no/such/file.tra"},
              "ae_variant": "vae", "hidden": "many", "data_mix": "everything"})");
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("corpus not found"), std::string::npos) << msg;
    EXPECT_NE(msg.find("unknown variant 'vae'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("config.hidden has the wrong type"), std::string::npos) << msg;
    EXPECT_NE(msg.find("unknown data mix"), std::string::npos) << msg;
  }
}

TEST(Config, UnknownFieldWarns) {
  const auto c = parse(R"({"dataset": {"kind": "roof", "colour": "red"}, "turbo": true,
                           "hyper": {"lambda": 0.001, "eta": 2}})");
  EXPECT_EQ(c.warnings.size(), 3u);
  EXPECT_DOUBLE_EQ(c.config.rows[0].hyper.lambda, 0.001);
}

TEST(Config, MissingDatasetRejected) { EXPECT_THROW(parse("{}"), ValidationError); }

TEST(Pnm, BitmapRoundTrip) {
  std::mt19937_64 rng(2);
  std::bernoulli_distribution coin(0.3);
  BinaryImage img(7, 5, 0);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = coin(rng);
  std::istringstream in(io::to_pbm(img));
  EXPECT_TRUE(io::parse_pnm(in) == img);
}

TEST(Pnm, GraymapThresholdAndComments) {
  std::istringstream in("P2\n# made by hand\n3 1\n255\n0 128 255\n");
  const auto img = io::parse_pnm(in);
  EXPECT_EQ(img.data(), (std::vector<std::uint8_t>{0, 1, 1}));
  GrayImage g(2, 1, 0.0);
  g[1] = 1.0;
  std::istringstream back(io::to_pgm(g));
  EXPECT_EQ(io::parse_pnm(back).data(), (std::vector<std::uint8_t>{0, 1}));
}

TEST(Pnm, RejectsMalformed) {
  std::istringstream a("P1\n2 2\n1 0 1\n");
  EXPECT_THROW(io::parse_pnm(a), ParseError);
  std::istringstream b("P4\n1 1\n0\n");
  EXPECT_THROW(io::parse_pnm(b), ParseError);
  std::istringstream c("P2\n1 1\n10\n11\n");
  EXPECT_THROW(io::parse_pnm(c), ParseError);
  std::istringstream d("P1\n2 1\n1 x\n");
  EXPECT_THROW(io::parse_pnm(d), ParseError);
}

TEST(PrototypeIo, RoundTrip) {
  for (const auto& style : roof_styles()) {
    const auto p = roof_prototype(style);
    const auto back = io::prototype_from_json(io::Json::parse(io::prototype_to_json(p).dump()));
    EXPECT_EQ(back.class_label, p.class_label);
    EXPECT_EQ(back.width, p.width);
    EXPECT_TRUE(back.initial == p.initial);
  }
}

TEST(PrototypeIo, RejectsBadEdges) {
  auto doc = io::prototype_to_json(gable_prototype());
  doc["edges"].push_back(io::Json::array({0, 42}));
  EXPECT_THROW(io::prototype_from_json(doc), SchemaError);
  auto nocls = io::prototype_to_json(gable_prototype());
  nocls.erase("class");
  EXPECT_THROW(io::prototype_from_json(nocls), SchemaError);
}

TEST(CorpusIo, ManifestRoundTrip) {
  const auto dir = scratch("corpus");
  io::Corpus c;
  const auto g = gable_prototype();
  c.entries.push_back({"a.pbm", "gable", "real", render(g), std::nullopt, io::Json::object()});
  c.entries.push_back({"b.pbm", "gable", "syn1", render(g), g.initial, io::Json{{"pair", "a.pbm"}, {"dist", 0.25}}});
  io::save_corpus(dir.string(), c);
  const auto back = io::load_corpus(dir.string());
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_TRUE(back.entries[0].image == c.entries[0].image);
  EXPECT_FALSE(back.entries[0].points.has_value());
  EXPECT_TRUE(*back.entries[1].points == g.initial);
  EXPECT_EQ(back.entries[1].meta["pair"], "a.pbm");
  EXPECT_EQ(back.entries[1].role, "syn1");
  EXPECT_EQ(back.labels(), (std::vector<std::string>{"gable"}));
  EXPECT_THROW(io::load_corpus((dir / "missing").string()), ParseError);
  fs::remove_all(dir);
}

TEST(CorpusIo, RejectsUnknownRole) {
  const auto dir = scratch("role");
  io::write_json((dir / "manifest.json").string(),
                 io::Json{{"version", io::kCorpusVersion},
                          {"items", io::Json::array({{{"file", "x.pbm"}, {"class", "a"}, {"role", "fake"}}})}});
  EXPECT_THROW(io::load_corpus(dir.string()), SchemaError);
  fs::remove_all(dir);
}
