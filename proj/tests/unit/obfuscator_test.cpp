// Copyright 2026 The obfx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstring>
#include <sstream>

#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "obfx/data.hpp"
#include "obfx/error.hpp"
#include "obfx/obfuscator.hpp"

namespace obfx {
namespace {

using nn::Matrix;

bool BitwiseEqual(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

Matrix RandomUnit(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

// A scaled-down arch with the same block structure.
ObfuscatorArch SmallArch(int in) {
  ObfuscatorArch a;
  const int enc[] = {in, 10, 8};
  const int cls[] = {8, 5, 2};
  const int rest[] = {8, 6};
  const int dec[] = {8, 10, in};
  a.encoder = nn::MakeChain(enc, nn::Activation::kRelu, nn::Activation::kRelu);
  a.classifier = nn::MakeChain(cls, nn::Activation::kRelu, nn::Activation::kLogSoftmax);
  a.rest = nn::MakeChain(rest, nn::Activation::kRelu, nn::Activation::kRelu);
  a.decoder = nn::MakeChain(dec, nn::Activation::kRelu, nn::Activation::kSigmoid);
  return a;
}

TEST(CategoricalArch, Shapes) {
  const ObfuscatorArch a = CategoricalArch();
  EXPECT_EQ(a.input_dim(), 102);
  EXPECT_EQ(a.bottleneck(), 64);
  EXPECT_EQ(a.classifier_dim(), 2);
  EXPECT_EQ(a.rest_dim(), 62);
  EXPECT_EQ(a.decoder.output_dim(), 102);
  EXPECT_NO_THROW(a.Validate());
  EXPECT_EQ(a.ParamCount(), 86494);
  EXPECT_EQ(kReportedObfuscatorParams - a.ParamCount(), 2000);
}

TEST(CategoricalArch, ValidateRejectsMismatch) {
  ObfuscatorArch a = CategoricalArch();
  a.rest.layers.back().out_dim = 61;
  EXPECT_THROW(a.Validate(), UsageError);
}

TEST(Obfuscator, EncodeWidthAndZeroInput) {
  const ObfuscatorModel m = InitObfuscator(CategoricalArch(), 3);
  const Matrix v = Encode(m, Matrix::Zero(102, 1));
  EXPECT_EQ(v.rows(), 64);
  EXPECT_EQ(v, Matrix::Zero(64, 1));
  const Matrix x = RandomUnit(102, 3, 1);
  EXPECT_TRUE(BitwiseEqual(Encode(m, x), Encode(m, x)));
  EXPECT_THROW(Encode(m, Matrix::Zero(101, 1)), UsageError);
}

TEST(Obfuscator, HeadsAndReconstruction) {
  const ObfuscatorModel m = InitObfuscator(CategoricalArch(), 3);
  const Matrix x = RandomUnit(102, 16, 2);
  const Matrix v = Encode(m, x);
  const Matrix w_np = Classify(m, v);
  const Matrix w_p = RestHead(m, v);
  EXPECT_EQ(w_np.rows(), 2);
  EXPECT_EQ(w_p.rows(), 62);
  for (int c = 0; c < 16; ++c) EXPECT_NEAR(w_np.col(c).array().exp().sum(), 1.0, 1e-9);
  EXPECT_TRUE((w_p.array() >= 0.0).all());
  const Matrix xr = Reconstruct(m, x);
  EXPECT_TRUE((xr.array() >= 0.0).all() && (xr.array() <= 1.0).all());
  EXPECT_TRUE(BitwiseEqual(xr, Decode(m, w_np, w_p)));
}

TEST(ComputeGradients, ClassifierLossNeverReachesDecoderOrRest) {
  const ObfuscatorModel m = InitObfuscator(CategoricalArch(), 5);
  const Matrix x = RandomUnit(102, 8, 3);
  const std::vector<int> y = {0, 1, 1, 0, 1, 0, 0, 1};
  const ObfuscatorGradients g =
      ComputeGradients(m, x, y, LossTerm::kClassifier, nn::Mode::kEval, nullptr);
  EXPECT_EQ(g.decoder.MaxAbs(), 0.0);
  EXPECT_EQ(g.rest.MaxAbs(), 0.0);
  EXPECT_GT(g.classifier.MaxAbs(), 0.0);
  EXPECT_GT(g.encoder.MaxAbs(), 0.0);
}

TEST(ComputeGradients, JointGradientMatchesFiniteDifferences) {
  ObfuscatorModel m = InitObfuscator(SmallArch(7), 8);
  for (auto* net : {&m.encoder, &m.classifier, &m.rest, &m.decoder}) {
    for (auto& l : net->layers) l.bias.setConstant(0.05);
  }
  const Matrix x = RandomUnit(7, 5, 4);
  const std::vector<int> y = {1, 0, 0, 1, 1};
  const ObfuscatorGradients g =
      ComputeGradients(m, x, y, LossTerm::kJoint, nn::Mode::kEval, nullptr);
  auto loss = [&] {
    const auto s = ComputeGradients(m, x, y, LossTerm::kJoint, nn::Mode::kEval, nullptr);
    return s.loss_ae + s.loss_c;
  };
  struct Block {
    nn::NetworkParams* params;
    const nn::GradientBundle* grad;
  } blocks[] = {{&m.encoder, &g.encoder},
                {&m.classifier, &g.classifier},
                {&m.rest, &g.rest},
                {&m.decoder, &g.decoder}};
  for (auto& b : blocks) {
    for (std::int64_t i = 0; i < nn::ParamCount(*b.params); ++i) {
      const double num = testing::CentralDifference(nn::ParamAt(*b.params, i), loss);
      ASSERT_LT(testing::RelativeError(nn::GradAt(*b.grad, i), num), 1e-4) << i;
    }
  }
}

data::Dataset Synth(int n, double correlation, std::uint64_t seed) {
  data::SynthSpec s;
  s.n = n;
  s.correlation = correlation;
  s.seed = seed;
  return data::SynthGenerate(s);
}

TEST(TrainObfuscator, ReducesLossAndIsDeterministic) {
  const auto [train, val] = data::Split(Synth(1200, 0.9, 1), {0.8, 2});
  TrainHyper h;
  h.epochs = 6;
  h.seed = 12;
  const ObfuscatorArch arch = CategoricalArch(train.width());
  const TrainResult a = TrainObfuscator(arch, train, val, h);
  EXPECT_LT(a.model.meta.best_val_ae, a.history.initial_val_ae);
  ASSERT_FALSE(a.history.epochs.empty());
  for (const auto& e : a.history.epochs) {
    EXPECT_GE(e.val_ae, a.model.meta.best_val_ae);
  }
  const TrainResult b = TrainObfuscator(arch, train, val, h);
  ASSERT_EQ(a.history.epochs.size(), b.history.epochs.size());
  for (size_t i = 0; i < a.history.epochs.size(); ++i) {
    EXPECT_EQ(a.history.epochs[i].val_ae, b.history.epochs[i].val_ae);
    EXPECT_EQ(a.history.epochs[i].train_c, b.history.epochs[i].train_c);
  }
  std::ostringstream ha, hb;
  WriteHistoryCsv(a.history, ha);
  WriteHistoryCsv(b.history, hb);
  EXPECT_EQ(ha.str(), hb.str());
}

TEST(TrainObfuscator, SeparableLabelGivesAccurateClassifier) {
  const auto [train, val] = data::Split(Synth(2000, 1.0, 3), {0.8, 4});
  TrainHyper h;
  h.epochs = 10;
  h.seed = 1;
  const TrainResult r = TrainObfuscator(CategoricalArch(train.width()), train, val, h);
  EXPECT_GE(Score(r.model, val).accuracy, 0.95);
}

TEST(TrainObfuscator, EarlyStopKeepsBestSnapshot) {
  const auto [train, val] = data::Split(Synth(400, 0.5, 5), {0.5, 6});
  TrainHyper h;
  h.epochs = 40;
  h.patience = 1;
  h.learning_rate = 0.01;
  h.seed = 3;
  const TrainResult r = TrainObfuscator(CategoricalArch(train.width()), train, val, h);
  const double best = r.model.meta.best_val_ae;
  EXPECT_DOUBLE_EQ(Score(r.model, val).loss_ae, best);
  for (const auto& e : r.history.epochs) EXPECT_GE(e.val_ae, best);
  if (r.history.early_stopped) {
    EXPECT_LT(static_cast<int>(r.history.epochs.size()), h.epochs);
    EXPECT_EQ(r.history.best_epoch + h.patience, static_cast<int>(r.history.epochs.size()));
  }
}

TEST(TrainObfuscator, RejectsEmptyValidation) {
  const data::Dataset train = Synth(50, 0.5, 1);
  const data::Dataset empty = train.Subset(std::vector<int>{});
  EXPECT_THROW(TrainObfuscator(CategoricalArch(train.width()), train, empty, TrainHyper{}),
               UsageError);
}

TEST(TrainHyper, Validation) {
  TrainHyper h;
  h.learning_rate = 0.0;
  EXPECT_THROW(h.Validate(), UsageError);
  h = TrainHyper{};
  h.patience = 0;
  EXPECT_THROW(h.Validate(), UsageError);
  h = TrainHyper{};
  h.batch_size = 0;
  EXPECT_THROW(h.Validate(), UsageError);
}

// ---- persistence ----------------------------------------------------------

TEST(ModelFile, RoundTripIsBitwise) {
  ObfuscatorModel m = InitObfuscator(CategoricalArch(), 77);
  for (auto* net : {&m.encoder, &m.classifier, &m.rest, &m.decoder}) {
    for (auto& l : net->layers) l.bias.setConstant(1.0 / 3.0);
  }
  m.meta.epochs_run = 4;
  m.meta.best_val_ae = 0.1 + 0.2;
  std::stringstream s;
  WriteModel(m, s);
  const ObfuscatorModel back = ReadModel(s, "mem");
  EXPECT_EQ(back.arch, m.arch);
  EXPECT_EQ(back.meta, m.meta);
  const Matrix x = RandomUnit(102, 100, 9);
  EXPECT_TRUE(BitwiseEqual(Reconstruct(m, x), Reconstruct(back, x)));
  std::stringstream again;
  WriteModel(back, again);
  EXPECT_EQ(again.str(), s.str());
}

TEST(ModelFile, BadMagicAndTruncation) {
  const ObfuscatorModel m = InitObfuscator(SmallArch(4), 1);
  std::stringstream s;
  WriteModel(m, s);
  const std::string text = s.str();
  EXPECT_EQ(text.rfind("OBFNET v1\n", 0), 0u);

  std::istringstream wrong("OBFNET v2\n" + text.substr(10));
  try {
    ReadModel(wrong, "mem");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("OBFNET v1"), std::string::npos) << e.what();
  }
  std::istringstream cut(text.substr(0, text.size() / 2));
  EXPECT_THROW(ReadModel(cut, "mem"), DataError);
}

}  // namespace
}  // namespace obfx
