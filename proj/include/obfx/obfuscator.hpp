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

// The four-network obfuscator: an encoder E, a classifier head C and a rest
// head R that split the bottleneck, and a decoder D that maps the
// concatenation [C(V) ; R(V)] back to the input space.

#ifndef OBFX_OBFUSCATOR_HPP_
#define OBFX_OBFUSCATOR_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "obfx/data.hpp"
#include "obfx/nn.hpp"

namespace obfx {

struct ObfuscatorArch {
  nn::NetworkSpec encoder;
  nn::NetworkSpec classifier;
  nn::NetworkSpec rest;
  nn::NetworkSpec decoder;

  void Validate() const;
  int input_dim() const { return encoder.input_dim(); }
  int bottleneck() const { return encoder.output_dim(); }
  int classifier_dim() const { return classifier.output_dim(); }
  int rest_dim() const { return rest.output_dim(); }
  std::int64_t ParamCount() const;

  bool operator==(const ObfuscatorArch&) const = default;
};

// The categorical architecture:
//   E: in -> 128 -> 128 -> 64 (relu)
//   C: 64 -> 32 -> 8 -> 2 (relu, log_softmax)
//   R: 64 -> 64 -> 62 (relu)
//   D: 64 -> 128 -> 128 -> in (relu, sigmoid)
ObfuscatorArch CategoricalArch(int input_dim = 102);

// Parameter count the published complexity table reports for the categorical
// obfuscator. The closed form over CategoricalArch(102) gives 86,494.
inline constexpr std::int64_t kReportedObfuscatorParams = 88494;

struct TrainHyper {
  double learning_rate = 0.001;
  int epochs = 50;
  int batch_size = 64;
  int patience = 5;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
  nn::AdamConfig adam;

  void Validate() const;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_ae = 0.0;
  double train_c = 0.0;
  double val_ae = 0.0;
  double val_c = 0.0;
  double val_accuracy = 0.0;
};

struct TrainHistory {
  // Validation metrics of the freshly initialized model.
  double initial_val_ae = 0.0;
  double initial_val_accuracy = 0.0;
  std::vector<EpochStats> epochs;
  int best_epoch = 0;  // 0 means the initial model was never improved upon
  bool early_stopped = false;
};

struct ObfuscatorModel {
  struct Metadata {
    std::uint64_t seed = 0;
    int epochs_run = 0;
    int best_epoch = 0;
    double best_val_ae = 0.0;
    double val_accuracy = 0.0;

    bool operator==(const Metadata&) const = default;
  };

  ObfuscatorArch arch;
  nn::NetworkParams encoder;
  nn::NetworkParams classifier;
  nn::NetworkParams rest;
  nn::NetworkParams decoder;
  Metadata meta;

  void Validate() const;
};

ObfuscatorModel InitObfuscator(const ObfuscatorArch& arch, std::uint64_t seed);

// Eval-mode building blocks over batches (one record per column).
nn::Matrix Encode(const ObfuscatorModel& model, const nn::Matrix& x);
nn::Matrix Classify(const ObfuscatorModel& model, const nn::Matrix& v);
nn::Matrix RestHead(const ObfuscatorModel& model, const nn::Matrix& v);
// Decodes a bottleneck V' = [w_np ; w_p] (classifier rows first).
nn::Matrix Decode(const ObfuscatorModel& model, const nn::Matrix& w_np,
                  const nn::Matrix& w_p);
nn::Matrix Reconstruct(const ObfuscatorModel& model, const nn::Matrix& x);

struct ObfuscatorGradients {
  nn::GradientBundle encoder;
  nn::GradientBundle classifier;
  nn::GradientBundle rest;
  nn::GradientBundle decoder;
  double loss_ae = 0.0;
  double loss_c = 0.0;
};

enum class LossTerm { kAutoencoder, kClassifier, kJoint };

// Gradients of the selected loss at the current parameter point over one
// batch. For kJoint this is d(L_ae + L_C); the decoder and rest head only see
// the L_ae path since L_C does not depend on them.
ObfuscatorGradients ComputeGradients(const ObfuscatorModel& model,
                                     const nn::Matrix& x,
                                     std::span<const int> y_nonprivate,
                                     LossTerm term, nn::Mode mode, Rng* rng);

struct ObfuscatorScores {
  double loss_ae = 0.0;
  double loss_c = 0.0;
  double accuracy = 0.0;  // classifier head vs y_nonprivate
};

ObfuscatorScores Score(const ObfuscatorModel& model, const data::Dataset& ds);

struct TrainResult {
  ObfuscatorModel model;  // best-validation snapshot
  TrainHistory history;
};

// Joint training of all four networks on L_ae + L_C with Adam and early
// stopping on validation L_ae. Throws NumericError if a batch loss is
// non-finite and UsageError if `val` is empty.
TrainResult TrainObfuscator(const ObfuscatorArch& arch,
                            const data::Dataset& train,
                            const data::Dataset& val, const TrainHyper& hyper);

void WriteHistoryCsv(const TrainHistory& history, std::ostream& out);

// "OBFNET v1" text format with 17-significant-digit floats.
void WriteModel(const ObfuscatorModel& model, std::ostream& out);
ObfuscatorModel ReadModel(std::istream& in, const std::string& source);
void SaveModel(const ObfuscatorModel& model, const std::string& path);
ObfuscatorModel LoadModel(const std::string& path);

}  // namespace obfx

#endif  // OBFX_OBFUSCATOR_HPP_
