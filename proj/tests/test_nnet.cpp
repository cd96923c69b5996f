#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mcae/nnet/autoencoder.hpp"
#include "mcae/nnet/gradcheck.hpp"
#include "mcae/nnet/train.hpp"
#include "support.hpp"

using namespace mcae;
using namespace mcae::testing;

namespace {

// Scalar long-double recomputation of one layer: sigmoid(W x + b).
long double layer_oracle(const Matrix& W, const Vector& b, const Matrix& X, Eigen::Index i,
                         Eigen::Index j) {
  long double z = b[j];
  for (Eigen::Index c = 0; c < X.cols(); ++c)
    z += static_cast<long double>(W(j, c)) * static_cast<long double>(X(i, c));
  return 1.0L / (1.0L + std::exp(-z));
}

// Term-by-term long-double evaluation of the SAE objective.
long double sae_oracle(const EncoderParams& enc, const DecoderParams& dec, const ChannelTask& t,
                       const Hyper& h) {
  const auto n = t.inputs.rows(), m = t.inputs.cols(), k = enc.W.rows();
  std::vector<long double> mean_act(static_cast<std::size_t>(k), 0.0L);
  long double recon = 0.0L;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<long double> hid(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) {
      hid[j] = layer_oracle(enc.W, enc.b, t.inputs, i, j);
      mean_act[j] += hid[j] / n;
    }
    for (Eigen::Index o = 0; o < m; ++o) {
      long double z = dec.b[o];
      for (Eigen::Index j = 0; j < k; ++j) z += dec.W(o, j) * hid[j];
      const long double y = 1.0L / (1.0L + std::exp(-z));
      recon += (y - t.targets(i, o)) * (y - t.targets(i, o));
    }
  }
  long double decay = 0.0L;
  for (Eigen::Index i = 0; i < enc.W.size(); ++i) decay += enc.W.data()[i] * enc.W.data()[i];
  for (Eigen::Index i = 0; i < dec.W.size(); ++i) decay += dec.W.data()[i] * dec.W.data()[i];
  long double kl = 0.0L;
  const long double d = h.delta;
  for (auto r : mean_act) kl += d * std::log(d / r) + (1 - d) * std::log((1 - d) / (1 - r));
  return recon / n + h.lambda * decay / 2 + h.rho * kl;
}

}  // namespace

TEST(Sigmoid, KnownValues) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(std::log(3.0)), 0.75, 1e-15);
  EXPECT_EQ(sigmoid(800.0), 1.0);
}

TEST(Sigmoid, DeepNegativeTailDoesNotOverflow) {
  // 1/(1+e^745) = 2.82e-324 (50-digit evaluation), which rounds to the
  // smallest subnormal double.
  const double v = sigmoid(-745.0);
  EXPECT_FALSE(std::isnan(v));
  EXPECT_GE(v, 0.0);
  EXPECT_LE(v, 1e-300);
  EXPECT_EQ(v, std::numeric_limits<double>::denorm_min());
  EXPECT_EQ(sigmoid(-1e4), 0.0);
}

TEST(Encode, ZeroWeightsGiveHalf) {
  EncoderParams p{Matrix::Zero(3, 4), Vector::Zero(3)};
  std::mt19937_64 rng(1);
  const Matrix H = encode(p, random_unit(5, 4, rng));
  EXPECT_EQ(H.rows(), 5);
  EXPECT_EQ(H.cols(), 3);
  EXPECT_TRUE((H.array() == 0.5).all());
}

TEST(Encode, IdentityOnZeroInput) {
  EncoderParams p{Matrix::Identity(4, 4), Vector::Zero(4)};
  EXPECT_TRUE((encode(p, Matrix::Zero(2, 4)).array() == 0.5).all());
}

TEST(Encode, MatchesScalarOracle) {
  std::mt19937_64 rng(7);
  EncoderParams p{random_normal(3, 4, rng), random_normal(3, 1, rng)};
  const Matrix X = random_unit(2, 4, rng);
  const Matrix H = encode(p, X);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 3; ++j)
      EXPECT_NEAR(H(i, j), static_cast<double>(layer_oracle(p.W, p.b, X, i, j)), 1e-12);
}

TEST(Encode, DimensionMismatchNamesShapes) {
  EncoderParams p{Matrix::Zero(3, 4), Vector::Zero(3)};
  try {
    encode(p, Matrix::Zero(2, 5));
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("2x5"), std::string::npos);
    EXPECT_NE(msg.find("3x4"), std::string::npos);
  }
}

TEST(Decode, ZeroWeightsGiveHalf) {
  DecoderParams p{Matrix::Zero(4, 3), Vector::Zero(4)};
  EXPECT_TRUE((decode(p, Matrix::Constant(2, 3, 0.3)).array() == 0.5).all());
}

TEST(Decode, ChainedIdentityEncoding) {
  std::mt19937_64 rng(11);
  EncoderParams enc{Matrix::Identity(3, 3), Vector::Zero(3)};
  DecoderParams dec{random_normal(3, 3, rng), random_normal(3, 1, rng)};
  const Matrix Y = decode(dec, encode(enc, Matrix::Zero(2, 3)));
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index o = 0; o < 3; ++o) {
      const long double z = 0.5L * dec.W.row(o).sum() + dec.b[o];
      EXPECT_NEAR(Y(i, o), static_cast<double>(1.0L / (1.0L + std::exp(-z))), 1e-14);
    }
}

TEST(Decode, MismatchedHiddenThrows) {
  DecoderParams p{Matrix::Zero(4, 3), Vector::Zero(4)};
  EXPECT_THROW(decode(p, Matrix::Zero(2, 2)), InvalidArgument);
}

TEST(KlSparsity, Values) {
  EXPECT_EQ(kl_sparsity(0.05, Vector::Constant(2, 0.05)), 0.0);
  // 50-digit evaluation: 0.49463193721407...
  EXPECT_NEAR(kl_sparsity(0.05, Vector::Constant(1, 0.5)), 0.494632, 1e-5);
  EXPECT_NEAR(kl_sparsity(0.05, Vector::Constant(1, 0.5)), 0.4946319372140728, 1e-14);
  Vector r(2);
  r << 0.3, 0.0;
  EXPECT_THROW(kl_sparsity(0.05, r), DomainError);
  r << 1.0, 0.2;
  EXPECT_THROW(kl_sparsity(0.05, r), DomainError);
}

TEST(SaeLoss, ZeroResidualNoRegularizers) {
  std::mt19937_64 rng(3);
  EncoderParams enc{random_normal(2, 3, rng), random_normal(2, 1, rng)};
  DecoderParams dec{random_normal(3, 2, rng), random_normal(3, 1, rng)};
  const Matrix X = random_unit(4, 3, rng);
  ChannelTask task{X, decode(dec, encode(enc, X))};
  Hyper h;
  h.lambda = 0.0;
  h.rho = 0.0;
  EXPECT_EQ(sae_loss(enc, dec, task, h).J, 0.0);
}

TEST(SaeLoss, DecayTermIsolated) {
  EncoderParams enc{Matrix::Constant(1, 1, 2.0), Vector::Zero(1)};
  DecoderParams dec{Matrix::Constant(1, 1, 2.0), Vector::Zero(1)};
  const Matrix X = Matrix::Constant(1, 1, 0.4);
  ChannelTask task{X, decode(dec, encode(enc, X))};
  Hyper h;
  h.lambda = 1.0;
  h.rho = 0.0;
  EXPECT_EQ(sae_loss(enc, dec, task, h).J, 4.0);
}

TEST(SaeLoss, MatchesTermwiseOracle) {
  std::mt19937_64 rng(5);
  EncoderParams enc{random_normal(3, 4, rng, 0.5), random_normal(3, 1, rng, 0.5)};
  DecoderParams dec{random_normal(4, 3, rng), random_normal(4, 1, rng)};
  ChannelTask task{random_unit(6, 4, rng), random_unit(6, 4, rng)};
  Hyper h{0.3, 0.7, 0.1, 1.0};
  const auto loss = sae_loss(enc, dec, task, h);
  EXPECT_NEAR(loss.J, static_cast<double>(sae_oracle(enc, dec, task, h)), 1e-12);
  EXPECT_NEAR(loss.rho_hat.sum() / 3.0, encode(enc, task.inputs).mean(), 1e-14);
}

TEST(SaeLoss, EmptyTaskRejected) {
  EncoderParams enc{Matrix::Zero(2, 3), Vector::Zero(2)};
  DecoderParams dec{Matrix::Zero(3, 2), Vector::Zero(3)};
  EXPECT_THROW(sae_loss(enc, dec, ChannelTask{Matrix(0, 3), Matrix(0, 3)}, Hyper{}),
               InvalidArgument);
}

TEST(McaeLoss, SymmetricChannelsDoubleTheSaeLoss) {
  std::mt19937_64 rng(9);
  auto model = random_model(4, 3, Hyper{0.01, 0.2, 0.1, 1.0}, rng);
  model.decoder_right = model.decoder_left;
  ChannelTask task{random_unit(5, 4, rng), random_unit(5, 4, rng)};
  const auto loss = mcae_loss(model, task, task);
  EXPECT_EQ(loss.J_left, loss.J_right);
  EXPECT_EQ(loss.balance(), 0.0);
  EXPECT_EQ(loss.E, 2.0 * loss.J_left);
}

TEST(McaeLoss, BalanceTermFromConstructedLosses) {
  // 1-1-1 net, zero residual, rho = 0: J = lambda (w_e^2 + w_d^2) / 2 with
  // w_e = 0, so J^L = 3 and J^R = 1.
  Hyper h{1.0, 0.0, 0.05, 1.0};
  McaeModel model{{Matrix::Zero(1, 1), Vector::Zero(1)},
                  {Matrix::Constant(1, 1, std::sqrt(6.0)), Vector::Zero(1)},
                  {Matrix::Constant(1, 1, std::sqrt(2.0)), Vector::Zero(1)},
                  h};
  const Matrix X = Matrix::Constant(2, 1, 0.2);
  ChannelTask left{X, decode(model.decoder_left, encode(model.encoder, X))};
  ChannelTask right{X, decode(model.decoder_right, encode(model.encoder, X))};
  const auto loss = mcae_loss(model, left, right);
  EXPECT_NEAR(loss.J_left, 3.0, 1e-12);
  EXPECT_NEAR(loss.J_right, 1.0, 1e-12);
  EXPECT_NEAR(loss.E - loss.J_left - loss.J_right, 2.0, 1e-12);
}

TEST(McaeLoss, ComposesFromSaeLosses) {
  std::mt19937_64 rng(13);
  Hyper h{0.05, 0.3, 0.2, 0.7};
  auto model = random_model(5, 3, h, rng);
  ChannelTask left{random_unit(6, 5, rng), random_unit(6, 5, rng)};
  ChannelTask right{random_unit(4, 5, rng), random_unit(4, 5, rng)};
  const double jl = sae_loss(model.encoder, model.decoder_left, left, h).J;
  const double jr = sae_loss(model.encoder, model.decoder_right, right, h).J;
  const auto loss = mcae_loss(model, left, right);
  EXPECT_NEAR(loss.E, jl + jr + 0.7 * 0.5 * (jl - jr) * (jl - jr), 1e-13);
}

TEST(McaeLoss, EncoderDecayCountedOnceWhenConfigured) {
  std::mt19937_64 rng(17);
  Hyper h{0.5, 0.0, 0.05, 0.0};
  auto model = random_model(3, 2, h, rng);
  ChannelTask t{random_unit(4, 3, rng), random_unit(4, 3, rng)};
  const double twice = mcae_loss(model, t, t).E;
  model.hyper.encoder_decay_per_channel = false;
  const double once = mcae_loss(model, t, t).E;
  EXPECT_NEAR(twice - once, 0.5 * 0.5 * model.encoder.W.squaredNorm(), 1e-12);
  EXPECT_LT(check_mcae_gradients(model, t, t).max_rel_error, 1e-6);
}

TEST(McaeLoss, ShapeMismatchRejected) {
  std::mt19937_64 rng(19);
  auto model = random_model(4, 3, Hyper{}, rng);
  ChannelTask good{random_unit(3, 4, rng), random_unit(3, 4, rng)};
  ChannelTask bad{random_unit(3, 5, rng), random_unit(3, 5, rng)};
  EXPECT_THROW(mcae_loss(model, good, bad), InvalidArgument);
  EXPECT_THROW(mcae_gradients(model, bad, good), InvalidArgument);
}

TEST(McaeGradients, GammaZeroIsSumOfSaeGradients) {
  std::mt19937_64 rng(23);
  Hyper h{0.02, 0.3, 0.1, 0.0};
  auto model = random_model(4, 3, h, rng);
  ChannelTask left{random_unit(5, 4, rng), random_unit(5, 4, rng)};
  ChannelTask right{random_unit(5, 4, rng), random_unit(5, 4, rng)};
  const auto g = mcae_gradients(model, left, right);
  const auto gl = detail::channel_eval(model.encoder, model.decoder_left, left, h, true, true);
  const auto gr = detail::channel_eval(model.encoder, model.decoder_right, right, h, true, true);
  EXPECT_TRUE(g.d_W_e.isApprox(gl.d_W_e + gr.d_W_e, 1e-14));
  EXPECT_TRUE(g.d_b_e.isApprox(gl.d_b_e + gr.d_b_e, 1e-14));
  EXPECT_TRUE(same_values(g.d_W_d_left, gl.d_W_d));
  EXPECT_TRUE(same_values(g.d_W_d_right, gr.d_W_d));
  EXPECT_TRUE(same_values(g.d_b_d_right, gr.d_b_d));
}

TEST(McaeGradients, BalanceTermsVanishAtEquality) {
  std::mt19937_64 rng(29);
  Hyper h{0.02, 0.3, 0.1, 2.5};
  auto model = random_model(4, 3, h, rng);
  model.decoder_right = model.decoder_left;
  ChannelTask t{random_unit(5, 4, rng), random_unit(5, 4, rng)};
  const auto with_gamma = flatten(mcae_gradients(model, t, t));
  model.hyper.gamma = 0.0;
  const auto without = flatten(mcae_gradients(model, t, t));
  EXPECT_TRUE(same_values(with_gamma, without));
}

TEST(McaeGradients, MatchFiniteDifferences) {
  std::mt19937_64 rng(31);
  auto model = random_model(5, 3, Hyper{0.05, 0.4, 0.15, 1.3}, rng);
  ChannelTask left{random_unit(6, 5, rng), random_unit(6, 5, rng)};
  ChannelTask right{random_unit(6, 5, rng), random_unit(6, 5, rng)};
  const auto r = check_mcae_gradients(model, left, right, 1e-5);
  EXPECT_LT(r.max_rel_error, 1e-6);
}

TEST(FiniteDiff, QuadraticAndConstant) {
  Vector p = Vector::Constant(1, 3.0);
  const auto g = finite_diff_gradient([](const Vector& x) { return 0.5 * x.squaredNorm(); }, p, 1e-5);
  EXPECT_NEAR(g[0], 3.0, 1e-8);
  const auto z = finite_diff_gradient([](const Vector&) { return 4.2; }, Vector::Ones(5), 1e-5);
  EXPECT_TRUE((z.array() == 0.0).all());
  EXPECT_THROW(finite_diff_gradient([](const Vector&) { return 0.0; }, p, 0.0), InvalidArgument);
}

TEST(FiniteDiff, ModelOverloadAgreesWithAnalytic) {
  std::mt19937_64 rng(37);
  auto model = random_model(4, 3, Hyper{0.1, 0.2, 0.1, 0.5}, rng);
  ChannelTask left{random_unit(4, 4, rng), random_unit(4, 4, rng)};
  ChannelTask right{random_unit(4, 4, rng), random_unit(4, 4, rng)};
  const auto numeric = finite_diff_gradient(
      [&](const McaeModel& m) { return mcae_loss(m, left, right).E; }, model, 1e-5);
  const auto analytic = mcae_gradients(model, left, right);
  EXPECT_LT(max_relative_error(flatten(numeric), flatten(analytic)), 1e-6);
  EXPECT_EQ(numeric.d_W_d_right.rows(), 4);
  EXPECT_EQ(numeric.d_W_d_right.cols(), 3);
}

// Property: gradient exactness over random sizes, all regularizers active.
TEST(Properties, GradientExactnessOverRandomInstances) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_grad_instance(rng);
    EXPECT_LT(check_mcae_gradients(inst.model, inst.left, inst.right).max_rel_error, 1e-6)
        << "trial " << trial;
  }
}

TEST(Properties, EnergyIsAffineInGamma) {
  std::mt19937_64 rng(41);
  auto model = random_model(4, 3, Hyper{0.01, 0.1, 0.1, 0.0}, rng);
  ChannelTask left{random_unit(5, 4, rng), random_unit(5, 4, rng)};
  ChannelTask right{random_unit(3, 4, rng), random_unit(3, 4, rng)};
  const auto base = mcae_loss(model, left, right);
  const double slope = base.balance();
  EXPECT_GT(slope, 0.0);
  for (double gamma : {0.5, 1.0, 3.0}) {
    model.hyper.gamma = gamma;
    EXPECT_NEAR(mcae_loss(model, left, right).E, base.E + gamma * slope, 1e-12);
  }
}

TEST(Properties, GammaZeroDecomposesExactly) {
  std::mt19937_64 rng(43);
  Hyper h{0.03, 0.2, 0.1, 0.0};
  auto model = random_model(4, 2, h, rng);
  ChannelTask left{random_unit(5, 4, rng), random_unit(5, 4, rng)};
  ChannelTask right{random_unit(6, 4, rng), random_unit(6, 4, rng)};
  EXPECT_EQ(mcae_loss(model, left, right).E,
            sae_loss(model.encoder, model.decoder_left, left, h).J +
                sae_loss(model.encoder, model.decoder_right, right, h).J);
}

TEST(Properties, SharedEncoderCoupling) {
  std::mt19937_64 rng(47);
  auto model = random_model(4, 3, Hyper{0.01, 0.1, 0.1, 1.0}, rng);
  ChannelTask left{random_unit(5, 4, rng), random_unit(5, 4, rng)};
  ChannelTask right{random_unit(5, 4, rng), random_unit(5, 4, rng)};
  const auto base = mcae_loss(model, left, right);

  auto l = model;
  l.decoder_left.W(0, 0) += 0.3;
  const auto after_left = mcae_loss(l, left, right);
  EXPECT_EQ(after_left.J_right, base.J_right);
  EXPECT_NE(after_left.J_left, base.J_left);

  auto r = model;
  r.decoder_right.b(1) -= 0.2;
  const auto after_right = mcae_loss(r, left, right);
  EXPECT_EQ(after_right.J_left, base.J_left);
  EXPECT_NE(after_right.J_right, base.J_right);

  auto e = model;
  e.encoder.W(1, 2) += 0.3;
  const auto after_enc = mcae_loss(e, left, right);
  EXPECT_NE(after_enc.J_left, base.J_left);
  EXPECT_NE(after_enc.J_right, base.J_right);
}

TEST(Properties, EncodeDecodeArePure) {
  std::mt19937_64 rng(53);
  auto model = random_model(4, 3, Hyper{}, rng);
  const Matrix X = random_unit(6, 4, rng);
  const Matrix a = decode(model.decoder_left, encode(model.encoder, X));
  const Matrix b = decode(model.decoder_left, encode(model.encoder, X));
  EXPECT_TRUE(same_values(a, b));
}

TEST(InitParams, DeterministicAndBounded) {
  const auto [e1, l1, r1] = init_params(7, 4, 99);
  const auto [e2, l2, r2] = init_params(7, 4, 99);
  EXPECT_TRUE(e1 == e2);
  EXPECT_TRUE(l1 == l2);
  EXPECT_TRUE(r1 == r2);
  const double r = std::sqrt(6.0 / 11.0);
  for (const Matrix* w : {&e1.W, &l1.W, &r1.W}) EXPECT_LE(w->cwiseAbs().maxCoeff(), r);
  EXPECT_TRUE((e1.b.array() == 0.0).all());
  EXPECT_TRUE((l1.b.array() == 0.0).all());
  const auto [e3, l3, r3] = init_params(7, 4, 100);
  EXPECT_FALSE(e1 == e3);
}

TEST(InitParams, MeanWithinThreeStandardErrors) {
  const auto [enc, left, right] = init_params(100, 100, 5);
  const double r = std::sqrt(6.0 / 200.0);
  const double n = static_cast<double>(enc.W.size());  // 10^4 draws
  const double se = (r / std::sqrt(3.0)) / std::sqrt(n);
  EXPECT_LT(std::abs(enc.W.mean()), 3.0 * se);
  EXPECT_THROW(init_params(0, 3, 1), InvalidArgument);
}

TEST(Train, RejectsZeroIterations) {
  auto model = make_model(3, 3, Hyper{}, 1);
  std::mt19937_64 rng(1);
  ChannelTask t{random_unit(4, 3, rng), random_unit(4, 3, rng)};
  TrainOptions opts;
  opts.max_iters = 0;
  EXPECT_THROW(train(model, t, t, opts), InvalidArgument);
}

TEST(Train, ConvergesOnTinyIdentityTask) {
  std::mt19937_64 rng(3);
  Matrix X = 0.2 * Matrix::Ones(4, 3) + 0.6 * random_unit(4, 3, rng);
  ChannelTask t{X, X};
  Hyper h{1e-3, 0.01, 0.3, 1.0};
  auto model = make_model(3, 3, h, 8);
  TrainOptions opts;
  opts.max_iters = 500;
  opts.tol = 1e-6;
  const auto res = train(model, t, t, opts);
  ASSERT_GE(res.trace.rows.size(), 2u);
  EXPECT_LT(res.trace.rows.back().E, res.trace.rows.front().E);
  EXPECT_LT(res.trace.rows.back().grad_norm, opts.tol);
  EXPECT_EQ(res.trace.stop_reason, "gradient-tolerance");
  for (std::size_t i = 1; i < res.trace.rows.size(); ++i)
    EXPECT_LE(res.trace.rows[i].E, res.trace.rows[i - 1].E);
}

TEST(Train, MonotoneTraceOnRandomTwoChannelTask) {
  std::mt19937_64 rng(61);
  ChannelTask left{random_unit(20, 6, rng), random_unit(20, 6, rng)};
  ChannelTask right{random_unit(20, 6, rng), random_unit(20, 6, rng)};
  auto model = make_model(6, 4, Hyper{}, 3);
  TrainOptions opts;
  opts.max_iters = 60;
  const auto res = train(model, left, right, opts);
  for (std::size_t i = 1; i < res.trace.rows.size(); ++i) {
    EXPECT_LE(res.trace.rows[i].E, res.trace.rows[i - 1].E);
    const auto& row = res.trace.rows[i];
    EXPECT_NEAR(row.E, row.J_left + row.J_right + 0.5 * std::pow(row.J_left - row.J_right, 2), 1e-9);
  }
  const auto final_loss = mcae_loss(res.model, left, right);
  EXPECT_EQ(final_loss.E, res.trace.rows.back().E);
}

TEST(Train, MiniBatchOptionReducesLoss) {
  std::mt19937_64 rng(67);
  Matrix X = random_unit(40, 5, rng);
  ChannelTask t{X, X};
  auto model = make_model(5, 4, Hyper{1e-4, 0.0, 0.05, 1.0}, 2);
  TrainOptions opts;
  opts.optimizer = OptimizerKind::MiniBatchGd;
  opts.max_iters = 50;
  opts.batch_size = 10;
  opts.learning_rate = 1.0;
  const auto a = train(model, t, t, opts);
  const auto b = train(model, t, t, opts);
  EXPECT_LT(a.trace.rows.back().E, a.trace.rows.front().E);
  EXPECT_TRUE(a.model == b.model);
}

TEST(SingleChannel, SaeLearnsReachableIdentity) {
  std::mt19937_64 rng(71);
  // Smooth low-rank data inside (0.15, 0.85).
  Matrix codes = random_unit(30, 2, rng);
  Matrix mix = random_normal(2, 5, rng);
  Matrix X = (codes * mix).unaryExpr([](double v) { return 0.15 + 0.7 * sigmoid(v); });
  ChannelTask t{X, X};
  TrainOptions opts;
  opts.max_iters = 1500;
  opts.tol = 1e-9;
  const auto res = train_single_channel(t, 5, Hyper{1e-6, 0.0, 0.05, 1.0}, opts, 4);
  const Matrix Y = decode(res.model.decoder_left, encode(res.model.encoder, X));
  EXPECT_LT((Y - X).squaredNorm() / static_cast<double>(X.size()), 1e-3);
  EXPECT_EQ(res.model.hyper.gamma, 0.0);
  EXPECT_EQ(res.trace.rows.back().J_right, 0.0);
}

TEST(SingleChannel, CiaeTaskShape) {
  std::mt19937_64 rng(73);
  const Matrix Xs = random_unit(5, 4, rng), Xr = random_unit(5, 4, rng);
  const auto t = concat_columns(ChannelTask{Xs, Xr}, ChannelTask{Xr, Xr});
  EXPECT_EQ(t.inputs.rows(), 5);
  EXPECT_EQ(t.inputs.cols(), 8);
  EXPECT_TRUE(same_values(t.inputs.leftCols(4), Xs));
  EXPECT_TRUE(same_values(t.inputs.rightCols(4), Xr));
  EXPECT_TRUE(same_values(t.targets.leftCols(4), Xr));
  EXPECT_THROW(concat_columns(ChannelTask{Xs, Xr}, ChannelTask{Xr.topRows(3), Xr.topRows(3)}),
               InvalidArgument);
}

TEST(SingleChannel, SynToRealIsAnOrdinaryModel) {
  std::mt19937_64 rng(79);
  ChannelTask t{random_unit(10, 4, rng), random_unit(10, 4, rng)};
  TrainOptions opts;
  opts.max_iters = 20;
  const auto res = train_single_channel(t, 3, Hyper{}, opts, 1);
  static_assert(std::is_same_v<decltype(res.model), McaeModel>);
  EXPECT_NO_THROW(res.model.validate());
}
