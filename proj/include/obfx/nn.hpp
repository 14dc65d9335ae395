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

// Dense feed-forward networks with exact backpropagation and Adam.
//
// Activations are stored column-major with one record per column, so a batch
// of B records with D features is a D x B matrix. A single record is simply a
// batch of one.

#ifndef OBFX_NN_HPP_
#define OBFX_NN_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "obfx/rng.hpp"

namespace obfx::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { kRelu, kLeakyRelu, kSigmoid, kLogSoftmax, kNone };

std::string_view ActivationName(Activation a);
std::optional<Activation> ParseActivation(std::string_view name);

struct LayerSpec {
  int in_dim = 1;
  int out_dim = 1;
  Activation activation = Activation::kNone;
  // Applied to the layer's input in training mode (inverted dropout).
  double dropout_p = 0.0;

  bool operator==(const LayerSpec&) const = default;
};

struct NetworkSpec {
  std::vector<LayerSpec> layers;
  double leaky_slope = 0.01;

  // Throws UsageError on empty networks, non-positive widths, incompatible
  // neighbours, dropout outside [0,1) or log_softmax before the last layer.
  void Validate() const;
  int input_dim() const { return layers.front().in_dim; }
  int output_dim() const { return layers.back().out_dim; }

  bool operator==(const NetworkSpec&) const = default;
};

// Builds a chain spec from widths, e.g. {102, 128, 64} with the given
// hidden and final activations.
NetworkSpec MakeChain(std::span<const int> widths, Activation hidden,
                      Activation last,
                      std::span<const double> dropout = {});

struct LayerParams {
  Matrix weight;  // out_dim x in_dim
  Vector bias;    // out_dim
};

struct NetworkParams {
  std::vector<LayerParams> layers;
};

struct LayerGradient {
  Matrix weight;
  Vector bias;
};

struct GradientBundle {
  std::vector<LayerGradient> layers;

  static GradientBundle ZerosLike(const NetworkParams& params);
  GradientBundle& operator+=(const GradientBundle& other);
  bool AllFinite() const;
  double MaxAbs() const;
};

enum class Mode { kTrain, kEval };

// Everything backward() needs from a forward pass.
struct ForwardCache {
  struct Layer {
    Matrix input;   // layer input after dropout
    Matrix mask;    // dropout keep-mask scaled by 1/(1-p); empty if unused
    Matrix output;  // post-activation
    Matrix pre;     // pre-activation (kept for relu/leaky_relu)
  };
  std::vector<Layer> layers;
  Eigen::Index batch = 0;
};

// Weights ~ N(0, init_variance) i.i.d., biases zero.
inline constexpr double kInitVariance = 0.02;
NetworkParams InitNetwork(const NetworkSpec& spec, std::uint64_t seed,
                          double init_variance = kInitVariance);

// Checks that params shape-match spec; throws UsageError otherwise.
void CheckParams(const NetworkSpec& spec, const NetworkParams& params);

// Forward pass over a batch (in_dim x B). `rng` is required in training mode
// whenever a layer has nonzero dropout. `cache` may be null.
Matrix Forward(const NetworkSpec& spec, const NetworkParams& params,
               const Matrix& x, Mode mode, Rng* rng, ForwardCache* cache);

// Single-record convenience overload; eval mode, no cache.
Vector Forward(const NetworkSpec& spec, const NetworkParams& params,
               const Vector& x);

// Gradients of a scalar loss given dLoss/dOutput (out_dim x B). If
// `input_grad` is non-null it receives dLoss/dInput (in_dim x B).
GradientBundle Backward(const NetworkSpec& spec, const NetworkParams& params,
                        const ForwardCache& cache, const Matrix& upstream,
                        Matrix* input_grad = nullptr);

struct Loss {
  double value = 0.0;
  Matrix grad;  // same shape as the prediction
};

// Mean over records of (1/N) * sum_j (x_j - x'_j)^2; gradient w.r.t. x_rec.
Loss MseLoss(const Matrix& x, const Matrix& x_rec);

// Mean over records of -log_probs[label]; gradient w.r.t. log_probs.
Loss NllLoss(const Matrix& log_probs, std::span<const int> labels);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  GradientBundle m;
  GradientBundle v;
  std::int64_t t = 0;
  AdamConfig config;

  static AdamState ZerosLike(const NetworkParams& params,
                             AdamConfig config = {});
};

// One bias-corrected Adam update. Throws NumericError on non-finite grads
// (params and state are left untouched in that case).
void AdamStep(NetworkParams& params, const GradientBundle& grads,
              AdamState& state, double learning_rate);

std::int64_t ParamCount(const NetworkSpec& spec);

// Flat views used by finite-difference checks and serialization.
std::int64_t ParamCount(const NetworkParams& params);
double& ParamAt(NetworkParams& params, std::int64_t flat_index);
double GradAt(const GradientBundle& grads, std::int64_t flat_index);

}  // namespace obfx::nn

#endif  // OBFX_NN_HPP_
