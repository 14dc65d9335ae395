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

#include "obfx/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "obfx/error.hpp"
#include "obfx/rng.hpp"

namespace obfx {

using nn::Matrix;

std::string_view ProtocolName(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::kWeakAdversary:
      return "weak";
    case ProtocolKind::kStrongAdversary:
      return "strong";
    case ProtocolKind::kUtility:
      return "utility";
    case ProtocolKind::kBaseline:
      return "baseline";
  }
  return "weak";
}

std::optional<ProtocolKind> ParseProtocol(std::string_view name) {
  for (auto k : {ProtocolKind::kWeakAdversary, ProtocolKind::kStrongAdversary,
                 ProtocolKind::kUtility, ProtocolKind::kBaseline}) {
    if (ProtocolName(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view UtilityEvalName(UtilityEval mode) {
  return mode == UtilityEval::kOriginal ? "original" : "obfuscated";
}

std::optional<UtilityEval> ParseUtilityEval(std::string_view name) {
  if (name == "original") return UtilityEval::kOriginal;
  if (name == "obfuscated") return UtilityEval::kObfuscated;
  return std::nullopt;
}

std::span<const int> Labels(const data::Dataset& ds, Target target) {
  return target == Target::kPrivate ? std::span<const int>(ds.y_private)
                                    : std::span<const int>(ds.y_nonprivate);
}

nn::NetworkSpec ProbeSpec(int input_dim) {
  const std::array<int, 5> widths = {input_dim, 256, 256, 128, 2};
  // Dropout acts on the input of the layer it is attached to, so the
  // probabilities sit on layers 2..4 (after each hidden layer).
  const std::array<double, 4> dropout = {0.0, 0.2, 0.3, 0.4};
  return nn::MakeChain(widths, nn::Activation::kRelu,
                       nn::Activation::kLogSoftmax, dropout);
}

TrainHyper ProbeConfig::DefaultProbeHyper() {
  TrainHyper h;
  h.epochs = 20;
  h.patience = 3;
  h.batch_size = 64;
  h.learning_rate = 0.001;
  h.validation_fraction = 0.1;
  return h;
}

ProbeConfig ProbeConfig::ForWidth(int input_dim) {
  ProbeConfig c;
  c.spec = ProbeSpec(input_dim);
  return c;
}

namespace {

constexpr Eigen::Index kChunk = 2048;

double MeanNll(const Probe& probe, const Matrix& x, std::span<const int> y) {
  double total = 0.0;
  for (Eigen::Index start = 0; start < x.cols(); start += kChunk) {
    const Eigen::Index n = std::min<Eigen::Index>(kChunk, x.cols() - start);
    const Matrix lp = PredictLogProbs(probe, x.middleCols(start, n));
    total += nn::NllLoss(lp, y.subspan(static_cast<size_t>(start),
                                       static_cast<size_t>(n)))
                 .value *
             static_cast<double>(n);
  }
  return total / static_cast<double>(x.cols());
}

}  // namespace

Probe TrainProbe(const ProbeConfig& config, const data::Dataset& ds,
                 Target target) {
  config.hyper.Validate();
  config.spec.Validate();
  ds.Validate();
  if (ds.width() != config.spec.input_dim()) {
    throw UsageError(fmt::format("probe expects width {}, dataset has {}",
                                 config.spec.input_dim(), ds.width()));
  }
  if (ds.size() < 2) throw UsageError("probe training needs at least 2 records");
  const TrainHyper& h = config.hyper;
  auto [fit_idx, hold_idx] = data::SplitIndices(
      ds.size(), {1.0 - h.validation_fraction, DeriveSeed(h.seed, kStreamSplit)});
  const data::Dataset fit = ds.Subset(fit_idx);
  const data::Dataset hold = ds.Subset(hold_idx);
  const std::span<const int> fit_y = Labels(fit, target);
  const std::span<const int> hold_y = Labels(hold, target);

  Probe probe;
  probe.spec = config.spec;
  probe.params = nn::InitNetwork(config.spec, DeriveSeed(h.seed, kStreamProbe));
  probe.train_records = fit.size();
  nn::AdamState adam = nn::AdamState::ZerosLike(probe.params, h.adam);
  Rng dropout_rng(DeriveSeed(h.seed, kStreamDropout));

  Probe best = probe;
  double best_loss = MeanNll(probe, hold.features, hold_y);
  int since_best = 0;
  std::vector<int> labels;
  for (int epoch = 1; epoch <= h.epochs; ++epoch) {
    const auto batches = data::Minibatches(
        fit.size(), h.batch_size,
        DeriveSeed(h.seed, kStreamShuffle, static_cast<std::uint64_t>(epoch)));
    for (size_t b = 0; b < batches.size(); ++b) {
      const auto& idx = batches[b];
      Matrix x(fit.width(), static_cast<Eigen::Index>(idx.size()));
      labels.resize(idx.size());
      for (size_t i = 0; i < idx.size(); ++i) {
        x.col(static_cast<Eigen::Index>(i)) = fit.features.col(idx[i]);
        labels[i] = fit_y[idx[i]];
      }
      nn::ForwardCache cache;
      const Matrix lp = nn::Forward(probe.spec, probe.params, x,
                                    nn::Mode::kTrain, &dropout_rng, &cache);
      const nn::Loss loss = nn::NllLoss(lp, labels);
      if (!std::isfinite(loss.value)) {
        throw NumericError(fmt::format(
            "probe: non-finite loss at epoch {} batch {}", epoch, b));
      }
      const nn::GradientBundle g =
          nn::Backward(probe.spec, probe.params, cache, loss.grad);
      nn::AdamStep(probe.params, g, adam, h.learning_rate);
    }
    probe.epochs_run = epoch;
    const double hold_loss = MeanNll(probe, hold.features, hold_y);
    if (!std::isfinite(hold_loss)) {
      throw NumericError(fmt::format("probe: non-finite validation loss at epoch {}",
                                     epoch));
    }
    if (hold_loss < best_loss) {
      best_loss = hold_loss;
      best = probe;
      best.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= h.patience) {
      break;
    }
  }
  best.epochs_run = probe.epochs_run;
  return best;
}

Matrix PredictLogProbs(const Probe& probe, const Matrix& x) {
  return nn::Forward(probe.spec, probe.params, x, nn::Mode::kEval, nullptr,
                     nullptr);
}

std::vector<int> Predict(const Probe& probe, const Matrix& x) {
  std::vector<int> out(static_cast<size_t>(x.cols()));
  for (Eigen::Index start = 0; start < x.cols(); start += kChunk) {
    const Eigen::Index n = std::min<Eigen::Index>(kChunk, x.cols() - start);
    const Matrix lp = PredictLogProbs(probe, x.middleCols(start, n));
    for (Eigen::Index c = 0; c < n; ++c) {
      Eigen::Index best = 0;
      lp.col(c).maxCoeff(&best);
      out[static_cast<size_t>(start + c)] = static_cast<int>(best);
    }
  }
  return out;
}

double EvalAccuracy(const Probe& probe, const data::Dataset& ds,
                    Target target) {
  if (ds.size() == 0) throw UsageError("cannot score a probe on an empty dataset");
  const std::vector<int> pred = Predict(probe, ds.features);
  const std::span<const int> y = Labels(ds, target);
  int correct = 0;
  for (size_t i = 0; i < pred.size(); ++i) correct += pred[i] == y[i];
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

namespace {

ProtocolResult Score(ProtocolKind kind, const Probe& probe,
                     const data::Dataset& scored, Target target,
                     const PrivacyParams& privacy, const ProbeConfig& config) {
  ProtocolResult r;
  r.protocol = kind;
  r.accuracy = EvalAccuracy(probe, scored, target);
  r.baseline = data::MajorityRate(Labels(scored, target));
  r.privacy = privacy;
  r.probe_seed = config.hyper.seed;
  r.probe_train_records = probe.train_records;
  r.probe_epochs = probe.epochs_run;
  return r;
}

}  // namespace

ProtocolResult WeakAdversaryProtocol(const data::Dataset& aux,
                                     const data::Dataset& obf_test,
                                     const PrivacyParams& privacy,
                                     const ProbeConfig& config) {
  const Probe probe = TrainProbe(config, aux, Target::kPrivate);
  return Score(ProtocolKind::kWeakAdversary, probe, obf_test, Target::kPrivate,
               privacy, config);
}

ProtocolResult StrongAdversaryProtocol(const ObfuscatorModel& model,
                                       const PrivacyParams& privacy,
                                       const data::Dataset& aux,
                                       const data::Dataset& obf_test,
                                       const ProbeConfig& config) {
  // The adversary runs the released model with its own noise draw.
  PrivacyParams own = privacy;
  own.noise_seed = DeriveSeed(privacy.noise_seed, kStreamNoise, 1);
  const data::Dataset dummy = ObfuscateDataset(model, aux, own);
  const Probe probe = TrainProbe(config, dummy, Target::kPrivate);
  return Score(ProtocolKind::kStrongAdversary, probe, obf_test,
               Target::kPrivate, privacy, config);
}

UtilityResult UtilityProtocol(const ObfuscatorModel& model,
                              const PrivacyParams& privacy,
                              const data::Dataset& train,
                              const data::Dataset& orig_test,
                              const ProbeConfig& config) {
  const data::Dataset obf_train = ObfuscateDataset(model, train, privacy);
  PrivacyParams test_privacy = privacy;
  test_privacy.noise_seed = DeriveSeed(privacy.noise_seed, kStreamNoise, 2);
  const data::Dataset obf_test = ObfuscateDataset(model, orig_test, test_privacy);
  UtilityResult out;
  out.probe = TrainProbe(config, obf_train, Target::kNonPrivate);
  out.on_original = Score(ProtocolKind::kUtility, out.probe, orig_test,
                          Target::kNonPrivate, privacy, config);
  out.on_original.eval_mode = UtilityEval::kOriginal;
  out.on_obfuscated = Score(ProtocolKind::kUtility, out.probe, obf_test,
                            Target::kNonPrivate, privacy, config);
  out.on_obfuscated.eval_mode = UtilityEval::kObfuscated;
  return out;
}

ProtocolResult BaselineProtocol(const data::Dataset& train,
                                const data::Dataset& test, Target target,
                                const ProbeConfig& config) {
  const Probe probe = TrainProbe(config, train, target);
  PrivacyParams none;
  none.g_enabled = false;
  none.f_enabled = false;
  return Score(ProtocolKind::kBaseline, probe, test, target, none, config);
}

DecorrelationResult DecorrelationTest(const ObfuscatorModel& model,
                                      const data::Dataset& ds, double lambda,
                                      const Probe& utility_probe,
                                      std::uint64_t seed) {
  if (ds.size() == 0) throw UsageError("decorrelation test needs records");
  if (model.arch.classifier_dim() != 2) {
    throw UsageError("decorrelation test expects a binary classifier head");
  }
  DecorrelationResult r;
  Rng rng(DeriveSeed(seed, kStreamInject));
  std::bernoulli_distribution coin(0.5);
  for (Eigen::Index start = 0; start < ds.size(); start += kChunk) {
    const Eigen::Index n = std::min<Eigen::Index>(kChunk, ds.size() - start);
    const Matrix v = Encode(model, ds.features.middleCols(start, n));
    const Matrix w_p = RestHead(model, v);
    Matrix w_np(2, n);
    std::vector<int> injected(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const int cls = coin(rng) ? 1 : 0;
      injected[static_cast<size_t>(i)] = cls;
      w_np(cls, i) = 0.0;
      w_np(1 - cls, i) = lambda;
    }
    const Matrix lp = PredictLogProbs(utility_probe, Decode(model, w_np, w_p));
    for (Eigen::Index i = 0; i < n; ++i) {
      const int cls = injected[static_cast<size_t>(i)];
      const int pred = lp(1, i) > lp(0, i) ? 1 : 0;
      r.injected[cls] += 1;
      r.counts[cls][pred] += 1;
      const double p1 = std::exp(lp(1, i));
      const int bin = std::clamp(static_cast<int>(p1 * 10.0), 0, 9);
      r.histogram[cls][bin] += 1;
    }
  }
  r.agreement = static_cast<double>(r.counts[0][0] + r.counts[1][1]) /
                static_cast<double>(ds.size());
  return r;
}

}  // namespace obfx
