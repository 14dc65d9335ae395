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

#include "obfx/nn.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "obfx/error.hpp"

namespace obfx::nn {

std::string_view ActivationName(Activation a) {
  switch (a) {
    case Activation::kRelu:
      return "relu";
    case Activation::kLeakyRelu:
      return "leaky_relu";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kLogSoftmax:
      return "log_softmax";
    case Activation::kNone:
      return "none";
  }
  return "none";
}

std::optional<Activation> ParseActivation(std::string_view name) {
  for (Activation a : {Activation::kRelu, Activation::kLeakyRelu,
                       Activation::kSigmoid, Activation::kLogSoftmax,
                       Activation::kNone}) {
    if (ActivationName(a) == name) return a;
  }
  return std::nullopt;
}

void NetworkSpec::Validate() const {
  if (layers.empty()) throw UsageError("network has no layers");
  for (size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    if (l.in_dim < 1 || l.out_dim < 1) {
      throw UsageError(fmt::format("layer {}: dimensions must be positive", i));
    }
    if (!(l.dropout_p >= 0.0 && l.dropout_p < 1.0)) {
      throw UsageError(fmt::format("layer {}: dropout_p {} not in [0,1)", i,
                                   l.dropout_p));
    }
    if (l.activation == Activation::kLogSoftmax && i + 1 != layers.size()) {
      throw UsageError(
          fmt::format("layer {}: log_softmax is only valid as the last layer",
                      i));
    }
    if (i > 0 && layers[i - 1].out_dim != l.in_dim) {
      throw UsageError(fmt::format("layer {}: in_dim {} != previous out_dim {}",
                                   i, l.in_dim, layers[i - 1].out_dim));
    }
  }
}

NetworkSpec MakeChain(std::span<const int> widths, Activation hidden,
                      Activation last, std::span<const double> dropout) {
  NetworkSpec spec;
  for (size_t i = 0; i + 1 < widths.size(); ++i) {
    LayerSpec l;
    l.in_dim = widths[i];
    l.out_dim = widths[i + 1];
    l.activation = (i + 2 == widths.size()) ? last : hidden;
    l.dropout_p = i < dropout.size() ? dropout[i] : 0.0;
    spec.layers.push_back(l);
  }
  spec.Validate();
  return spec;
}

GradientBundle GradientBundle::ZerosLike(const NetworkParams& params) {
  GradientBundle g;
  g.layers.reserve(params.layers.size());
  for (const auto& l : params.layers) {
    g.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()),
                        Vector::Zero(l.bias.size())});
  }
  return g;
}

GradientBundle& GradientBundle::operator+=(const GradientBundle& other) {
  if (other.layers.size() != layers.size()) {
    throw UsageError("gradient bundles have different layer counts");
  }
  for (size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += other.layers[i].weight;
    layers[i].bias += other.layers[i].bias;
  }
  return *this;
}

bool GradientBundle::AllFinite() const {
  return std::all_of(layers.begin(), layers.end(), [](const LayerGradient& l) {
    return l.weight.allFinite() && l.bias.allFinite();
  });
}

double GradientBundle::MaxAbs() const {
  double m = 0.0;
  for (const auto& l : layers) {
    if (l.weight.size() > 0) m = std::max(m, l.weight.cwiseAbs().maxCoeff());
    if (l.bias.size() > 0) m = std::max(m, l.bias.cwiseAbs().maxCoeff());
  }
  return m;
}

NetworkParams InitNetwork(const NetworkSpec& spec, std::uint64_t seed,
                          double init_variance) {
  spec.Validate();
  Rng rng(DeriveSeed(seed, kStreamInit));
  std::normal_distribution<double> normal(0.0, std::sqrt(init_variance));
  NetworkParams params;
  for (const LayerSpec& l : spec.layers) {
    LayerParams p;
    p.weight.resize(l.out_dim, l.in_dim);
    // Row-major fill order so the draw sequence matches the on-disk layout.
    for (int r = 0; r < l.out_dim; ++r) {
      for (int c = 0; c < l.in_dim; ++c) p.weight(r, c) = normal(rng);
    }
    p.bias = Vector::Zero(l.out_dim);
    params.layers.push_back(std::move(p));
  }
  return params;
}

void CheckParams(const NetworkSpec& spec, const NetworkParams& params) {
  if (params.layers.size() != spec.layers.size()) {
    throw UsageError(fmt::format("params have {} layers, spec has {}",
                                 params.layers.size(), spec.layers.size()));
  }
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    const auto& p = params.layers[i];
    if (p.weight.rows() != l.out_dim || p.weight.cols() != l.in_dim ||
        p.bias.size() != l.out_dim) {
      throw UsageError(fmt::format("layer {}: params do not match {}x{} spec",
                                   i, l.out_dim, l.in_dim));
    }
  }
}

namespace {

void ApplyActivation(Activation act, double leaky_slope, const Matrix& z,
                     Matrix& out) {
  switch (act) {
    case Activation::kRelu:
      out = z.cwiseMax(0.0);
      break;
    case Activation::kLeakyRelu:
      out = z.unaryExpr(
          [leaky_slope](double v) { return v > 0.0 ? v : leaky_slope * v; });
      break;
    case Activation::kSigmoid:
      out = z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
      break;
    case Activation::kLogSoftmax: {
      out.resize(z.rows(), z.cols());
      for (Eigen::Index c = 0; c < z.cols(); ++c) {
        const double m = z.col(c).maxCoeff();
        const double lse =
            m + std::log((z.col(c).array() - m).exp().sum());
        out.col(c) = z.col(c).array() - lse;
      }
      break;
    }
    case Activation::kNone:
      out = z;
      break;
  }
}

// dLoss/dz from dLoss/da.
Matrix ActivationBackward(Activation act, double leaky_slope,
                          const ForwardCache::Layer& cached,
                          const Matrix& upstream) {
  switch (act) {
    case Activation::kRelu:
      return (cached.pre.array() > 0.0).select(upstream, 0.0);
    case Activation::kLeakyRelu:
      return (cached.pre.array() > 0.0)
          .select(upstream, leaky_slope * upstream);
    case Activation::kSigmoid:
      return (upstream.array() * cached.output.array() *
              (1.0 - cached.output.array()))
          .matrix();
    case Activation::kLogSoftmax: {
      const Matrix softmax = cached.output.array().exp().matrix();
      const Eigen::RowVectorXd col_sums = upstream.colwise().sum();
      return upstream - (softmax.array().rowwise() * col_sums.array()).matrix();
    }
    case Activation::kNone:
      return upstream;
  }
  return upstream;
}

bool NeedsPreActivation(Activation act) {
  return act == Activation::kRelu || act == Activation::kLeakyRelu;
}

}  // namespace

Matrix Forward(const NetworkSpec& spec, const NetworkParams& params,
               const Matrix& x, Mode mode, Rng* rng, ForwardCache* cache) {
  CheckParams(spec, params);
  if (x.rows() != spec.input_dim()) {
    throw UsageError(fmt::format("input has {} rows, network expects {}",
                                 x.rows(), spec.input_dim()));
  }
  if (cache != nullptr) {
    cache->layers.assign(spec.layers.size(), {});
    cache->batch = x.cols();
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Matrix current = x;
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    const LayerParams& p = params.layers[i];
    Matrix mask;
    if (mode == Mode::kTrain && l.dropout_p > 0.0) {
      if (rng == nullptr) {
        throw UsageError("training-mode dropout requires an rng");
      }
      const double keep = 1.0 - l.dropout_p;
      const double scale = 1.0 / keep;
      mask.resize(current.rows(), current.cols());
      for (Eigen::Index c = 0; c < mask.cols(); ++c) {
        for (Eigen::Index r = 0; r < mask.rows(); ++r) {
          mask(r, c) = uniform(*rng) < keep ? scale : 0.0;
        }
      }
      current.array() *= mask.array();
    }
    Matrix z = p.weight * current;
    z.colwise() += p.bias;
    Matrix out;
    ApplyActivation(l.activation, spec.leaky_slope, z, out);
    if (cache != nullptr) {
      auto& c = cache->layers[i];
      c.input = std::move(current);
      c.mask = std::move(mask);
      if (NeedsPreActivation(l.activation)) c.pre = std::move(z);
      c.output = out;
    }
    current = std::move(out);
  }
  return current;
}

Vector Forward(const NetworkSpec& spec, const NetworkParams& params,
               const Vector& x) {
  return Forward(spec, params, Matrix(x), Mode::kEval, nullptr, nullptr)
      .col(0);
}

GradientBundle Backward(const NetworkSpec& spec, const NetworkParams& params,
                        const ForwardCache& cache, const Matrix& upstream,
                        Matrix* input_grad) {
  CheckParams(spec, params);
  if (cache.layers.size() != spec.layers.size()) {
    throw UsageError("forward cache does not belong to this network");
  }
  if (upstream.rows() != spec.output_dim() || upstream.cols() != cache.batch) {
    throw UsageError(fmt::format(
        "upstream gradient is {}x{}, expected {}x{}", upstream.rows(),
        upstream.cols(), spec.output_dim(), cache.batch));
  }
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& c = cache.layers[i];
    if (c.input.rows() != spec.layers[i].in_dim || c.input.cols() != cache.batch ||
        c.output.rows() != spec.layers[i].out_dim) {
      throw UsageError(fmt::format("stale forward cache at layer {}", i));
    }
  }

  GradientBundle grads;
  grads.layers.resize(spec.layers.size());
  Matrix delta = upstream;
  for (size_t k = spec.layers.size(); k-- > 0;) {
    const LayerSpec& l = spec.layers[k];
    const auto& c = cache.layers[k];
    const Matrix dz = ActivationBackward(l.activation, spec.leaky_slope, c, delta);
    grads.layers[k].weight = dz * c.input.transpose();
    grads.layers[k].bias = dz.rowwise().sum();
    if (k == 0 && input_grad == nullptr) break;
    delta = params.layers[k].weight.transpose() * dz;
    if (c.mask.size() > 0) delta.array() *= c.mask.array();
  }
  if (input_grad != nullptr) *input_grad = std::move(delta);
  return grads;
}

Loss MseLoss(const Matrix& x, const Matrix& x_rec) {
  if (x.rows() != x_rec.rows() || x.cols() != x_rec.cols()) {
    throw UsageError(fmt::format("mse: shapes {}x{} and {}x{} differ",
                                 x.rows(), x.cols(), x_rec.rows(),
                                 x_rec.cols()));
  }
  const double scale = 1.0 / static_cast<double>(x.rows() * x.cols());
  Loss loss;
  const Matrix diff = x_rec - x;
  loss.value = diff.squaredNorm() * scale;
  loss.grad = (2.0 * scale) * diff;
  return loss;
}

Loss NllLoss(const Matrix& log_probs, std::span<const int> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != log_probs.cols()) {
    throw UsageError(fmt::format("nll: {} labels for {} records", labels.size(),
                                 log_probs.cols()));
  }
  const double scale = 1.0 / static_cast<double>(log_probs.cols());
  Loss loss;
  loss.grad = Matrix::Zero(log_probs.rows(), log_probs.cols());
  double total = 0.0;
  for (Eigen::Index c = 0; c < log_probs.cols(); ++c) {
    const int y = labels[c];
    if (y < 0 || y >= log_probs.rows()) {
      throw UsageError(fmt::format("nll: label {} out of range [0,{})", y,
                                   log_probs.rows()));
    }
    total -= log_probs(y, c);
    loss.grad(y, c) = -scale;
  }
  loss.value = total * scale;
  return loss;
}

AdamState AdamState::ZerosLike(const NetworkParams& params, AdamConfig config) {
  AdamState s;
  s.m = GradientBundle::ZerosLike(params);
  s.v = GradientBundle::ZerosLike(params);
  s.config = config;
  return s;
}

void AdamStep(NetworkParams& params, const GradientBundle& grads,
              AdamState& state, double learning_rate) {
  if (grads.layers.size() != params.layers.size() ||
      state.m.layers.size() != params.layers.size()) {
    throw UsageError("adam: gradient/state layer count mismatch");
  }
  for (size_t i = 0; i < params.layers.size(); ++i) {
    if (grads.layers[i].weight.rows() != params.layers[i].weight.rows() ||
        grads.layers[i].weight.cols() != params.layers[i].weight.cols() ||
        grads.layers[i].bias.size() != params.layers[i].bias.size()) {
      throw UsageError(fmt::format("adam: gradient shape mismatch at layer {}", i));
    }
  }
  if (!grads.AllFinite()) throw NumericError("adam: non-finite gradient");

  const AdamConfig& cfg = state.config;
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);

  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    param.array() -= learning_rate * (m.array() / bc1) /
                     ((v.array() / bc2).sqrt() + cfg.epsilon);
  };
  for (size_t i = 0; i < params.layers.size(); ++i) {
    update(params.layers[i].weight, state.m.layers[i].weight,
           state.v.layers[i].weight, grads.layers[i].weight);
    update(params.layers[i].bias, state.m.layers[i].bias,
           state.v.layers[i].bias, grads.layers[i].bias);
  }
}

std::int64_t ParamCount(const NetworkSpec& spec) {
  std::int64_t n = 0;
  for (const auto& l : spec.layers) {
    n += static_cast<std::int64_t>(l.in_dim) * l.out_dim + l.out_dim;
  }
  return n;
}

std::int64_t ParamCount(const NetworkParams& params) {
  std::int64_t n = 0;
  for (const auto& l : params.layers) n += l.weight.size() + l.bias.size();
  return n;
}

double& ParamAt(NetworkParams& params, std::int64_t flat_index) {
  for (auto& l : params.layers) {
    if (flat_index < l.weight.size()) return l.weight.data()[flat_index];
    flat_index -= l.weight.size();
    if (flat_index < l.bias.size()) return l.bias.data()[flat_index];
    flat_index -= l.bias.size();
  }
  throw UsageError("flat parameter index out of range");
}

double GradAt(const GradientBundle& grads, std::int64_t flat_index) {
  for (const auto& l : grads.layers) {
    if (flat_index < l.weight.size()) return l.weight.data()[flat_index];
    flat_index -= l.weight.size();
    if (flat_index < l.bias.size()) return l.bias.data()[flat_index];
    flat_index -= l.bias.size();
  }
  throw UsageError("flat gradient index out of range");
}

}  // namespace obfx::nn
