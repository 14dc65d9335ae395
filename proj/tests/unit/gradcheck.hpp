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

// Central finite-difference helpers shared by the unit and acceptance tests.

#ifndef OBFX_TESTS_GRADCHECK_HPP_
#define OBFX_TESTS_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "obfx/nn.hpp"
#include "obfx/rng.hpp"

namespace obfx::testing {

inline constexpr double kStep = 1e-5;

// |a - n| / max(|a|, |n|), with the scale floored so that coordinates whose
// true value is below the finite-difference noise floor compare absolutely.
inline double RelativeError(double analytic, double numeric,
                            double floor = 1e-6) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

inline double CentralDifference(double& x, const std::function<double()>& f,
                                double h = kStep) {
  const double saved = x;
  x = saved + h;
  const double up = f();
  x = saved - h;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * h);
}

// A random chain with up to four layers and widths up to 16, using every
// activation. The final layer is log_softmax, sigmoid or none.
inline nn::NetworkSpec RandomSpec(Rng& rng) {
  std::uniform_int_distribution<int> depth(1, 4);
  std::uniform_int_distribution<int> width(1, 16);
  std::uniform_int_distribution<int> hidden_act(0, 2);
  std::uniform_int_distribution<int> last_act(0, 2);
  const nn::Activation hidden[] = {nn::Activation::kRelu,
                                   nn::Activation::kLeakyRelu,
                                   nn::Activation::kSigmoid};
  const nn::Activation last[] = {nn::Activation::kLogSoftmax,
                                 nn::Activation::kSigmoid,
                                 nn::Activation::kNone};
  nn::NetworkSpec spec;
  const int layers = depth(rng);
  int in = width(rng);
  for (int i = 0; i < layers; ++i) {
    nn::LayerSpec l;
    l.in_dim = in;
    l.out_dim = width(rng);
    if (i + 1 == layers) {
      l.activation = last[last_act(rng)];
      if (l.activation == nn::Activation::kLogSoftmax && l.out_dim < 2) l.out_dim = 2;
    } else {
      l.activation = hidden[hidden_act(rng)];
    }
    spec.layers.push_back(l);
    in = l.out_dim;
  }
  return spec;
}

// Smallest |pre-activation| over relu / leaky layers: finite differences are
// only valid away from the kink.
inline double KinkMargin(const nn::NetworkSpec& spec,
                         const nn::ForwardCache& cache) {
  double margin = INFINITY;
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    const auto a = spec.layers[i].activation;
    if (a == nn::Activation::kRelu || a == nn::Activation::kLeakyRelu) {
      margin = std::min(margin, cache.layers[i].pre.cwiseAbs().minCoeff());
    }
  }
  return margin;
}

}  // namespace obfx::testing

#endif  // OBFX_TESTS_GRADCHECK_HPP_
