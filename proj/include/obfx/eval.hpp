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

// Adversary and utility-provider probes and the measurement protocols built
// on them.
//
// Weak adversary:   trained on original-format records, scored on the
//                   obfuscated test set (target: y_private).
// Strong adversary: trained on records it obfuscated itself with the
//                   released model, scored on the obfuscated test set.
// Utility:          trained on the obfuscated training set (target:
//                   y_nonprivate), scored on the original test set, or on
//                   the obfuscated test set in the alternate mode.
// Baseline:         trained and scored on original records; the unobfuscated
//                   ceiling for either target.

#ifndef OBFX_EVAL_HPP_
#define OBFX_EVAL_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "obfx/data.hpp"
#include "obfx/nn.hpp"
#include "obfx/obfuscator.hpp"
#include "obfx/privatize.hpp"

namespace obfx {

enum class Target { kPrivate, kNonPrivate };
enum class ProtocolKind { kWeakAdversary, kStrongAdversary, kUtility, kBaseline };
enum class UtilityEval { kOriginal, kObfuscated };

std::string_view ProtocolName(ProtocolKind kind);
std::optional<ProtocolKind> ParseProtocol(std::string_view name);
std::string_view UtilityEvalName(UtilityEval mode);
std::optional<UtilityEval> ParseUtilityEval(std::string_view name);

std::span<const int> Labels(const data::Dataset& ds, Target target);

// in -> 256 -> 256 -> 128 -> 2 with input dropout 0.2 / 0.3 / 0.4 on the
// three hidden layers, relu, log_softmax head.
nn::NetworkSpec ProbeSpec(int input_dim = 102);

struct ProbeConfig {
  nn::NetworkSpec spec = ProbeSpec();
  TrainHyper hyper = DefaultProbeHyper();

  static TrainHyper DefaultProbeHyper();
  static ProbeConfig ForWidth(int input_dim);
};

struct Probe {
  nn::NetworkSpec spec;
  nn::NetworkParams params;
  int epochs_run = 0;
  int best_epoch = 0;
  int train_records = 0;
};

// NLL training with Adam; `hyper.validation_fraction` of the data is held out
// for early stopping on validation NLL and the best snapshot is returned.
Probe TrainProbe(const ProbeConfig& config, const data::Dataset& ds,
                 Target target);

nn::Matrix PredictLogProbs(const Probe& probe, const nn::Matrix& x);
std::vector<int> Predict(const Probe& probe, const nn::Matrix& x);

// Fraction of argmax-correct predictions, eval mode. Throws on empty data.
double EvalAccuracy(const Probe& probe, const data::Dataset& ds,
                    Target target);

struct ProtocolResult {
  ProtocolKind protocol = ProtocolKind::kWeakAdversary;
  double accuracy = 0.0;
  double baseline = 0.0;  // majority-class rate of the scored labels
  PrivacyParams privacy;
  std::uint64_t probe_seed = 0;
  UtilityEval eval_mode = UtilityEval::kOriginal;
  int probe_train_records = 0;
  int probe_epochs = 0;
};

ProtocolResult WeakAdversaryProtocol(const data::Dataset& aux,
                                     const data::Dataset& obf_test,
                                     const PrivacyParams& privacy,
                                     const ProbeConfig& config);

// Obfuscates `aux` with the model and privacy settings (the adversary's own
// noise draw) and trains on it with the true private labels.
ProtocolResult StrongAdversaryProtocol(const ObfuscatorModel& model,
                                       const PrivacyParams& privacy,
                                       const data::Dataset& aux,
                                       const data::Dataset& obf_test,
                                       const ProbeConfig& config);

struct UtilityResult {
  ProtocolResult on_original;
  ProtocolResult on_obfuscated;
  Probe probe;

  const ProtocolResult& Get(UtilityEval mode) const {
    return mode == UtilityEval::kOriginal ? on_original : on_obfuscated;
  }
};

// Trains the utility probe on obfuscate(train) and scores it on both the
// original and the obfuscated test set.
UtilityResult UtilityProtocol(const ObfuscatorModel& model,
                              const PrivacyParams& privacy,
                              const data::Dataset& train,
                              const data::Dataset& orig_test,
                              const ProbeConfig& config);

ProtocolResult BaselineProtocol(const data::Dataset& train,
                                const data::Dataset& test, Target target,
                                const ProbeConfig& config);

struct DecorrelationResult {
  double agreement = 0.0;  // P(predicted class == injected class)
  std::array<int, 2> injected = {0, 0};
  // counts[injected][predicted]
  std::array<std::array<int, 2>, 2> counts = {};
  // Histogram of the probe's P(class 1) in ten equal bins, per injected class.
  std::array<std::array<int, 10>, 2> histogram = {};
};

// Overwrites the classifier head with a random one-hot log-distribution
// ((0, lambda) or (lambda, 0)), decodes with the untouched rest head and asks
// the utility probe to classify the result.
DecorrelationResult DecorrelationTest(const ObfuscatorModel& model,
                                      const data::Dataset& ds, double lambda,
                                      const Probe& utility_probe,
                                      std::uint64_t seed);

}  // namespace obfx

#endif  // OBFX_EVAL_HPP_
