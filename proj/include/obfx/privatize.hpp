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

// Post-training privatization of the obfuscator bottleneck:
//   g: clamps the classifier head to a one-hot log-distribution of the true
//      non-private label, with lambda standing in for log(0);
//   f: adds i.i.d. Gaussian noise to the rest head with variance k * nu, where
//      nu is the record's mean rest-head activation.

#ifndef OBFX_PRIVATIZE_HPP_
#define OBFX_PRIVATIZE_HPP_

#include <cstdint>

#include "obfx/data.hpp"
#include "obfx/nn.hpp"
#include "obfx/obfuscator.hpp"
#include "obfx/rng.hpp"

namespace obfx {

inline constexpr double kDefaultLambda = -3000.0;
// Lower bound on nu so that sampling stays defined for all-zero rest outputs.
inline constexpr double kNuFloor = 1e-8;

struct PrivacyParams {
  double noise_multiplier = 0.0;  // k >= 0, noise variance = k * nu
  double lambda = kDefaultLambda;  // <= 0
  bool g_enabled = true;
  bool f_enabled = true;
  std::uint64_t noise_seed = 0;

  void Validate() const;
  bool operator==(const PrivacyParams&) const = default;
};

double Nu(const nn::Vector& w_p);

// Noise stream for one record; independent of processing order.
Rng RecordNoiseRng(std::uint64_t noise_seed, std::int64_t record_index);

nn::Vector ApplyF(const nn::Vector& w_p, const PrivacyParams& params,
                  Rng& rng);

// Throws UsageError if y_np is not a valid class index.
nn::Vector ApplyG(const nn::Vector& w_np, int y_np,
                  const PrivacyParams& params);

// D(g(C(E(x))) ; f(R(E(x)))) in eval mode.
nn::Vector ObfuscateRecord(const ObfuscatorModel& model, const nn::Vector& x,
                           int y_np, const PrivacyParams& params,
                           std::int64_t record_index);

// Maps ObfuscateRecord over all records; labels and column map pass through.
data::Dataset ObfuscateDataset(const ObfuscatorModel& model,
                               const data::Dataset& ds,
                               const PrivacyParams& params);

}  // namespace obfx

#endif  // OBFX_PRIVATIZE_HPP_
