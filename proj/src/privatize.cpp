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

#include "obfx/privatize.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "obfx/error.hpp"

namespace obfx {

using nn::Matrix;
using nn::Vector;

void PrivacyParams::Validate() const {
  if (!(noise_multiplier >= 0.0) || !std::isfinite(noise_multiplier)) {
    throw UsageError(fmt::format("noise multiplier {} must be finite and >= 0",
                                 noise_multiplier));
  }
  if (!(lambda <= 0.0) || !std::isfinite(lambda)) {
    throw UsageError(fmt::format("lambda {} must be finite and <= 0", lambda));
  }
}

double Nu(const Vector& w_p) {
  if (w_p.size() == 0) return kNuFloor;
  return std::max(w_p.mean(), kNuFloor);
}

Rng RecordNoiseRng(std::uint64_t noise_seed, std::int64_t record_index) {
  return Rng(DeriveSeed(noise_seed, kStreamNoise,
                        static_cast<std::uint64_t>(record_index)));
}

Vector ApplyF(const Vector& w_p, const PrivacyParams& params, Rng& rng) {
  if (!params.f_enabled || params.noise_multiplier == 0.0) return w_p;
  const double stddev = std::sqrt(params.noise_multiplier * Nu(w_p));
  std::normal_distribution<double> normal(0.0, stddev);
  Vector out = w_p;
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += normal(rng);
  return out;
}

Vector ApplyG(const Vector& w_np, int y_np, const PrivacyParams& params) {
  if (y_np < 0 || y_np >= w_np.size()) {
    throw UsageError(fmt::format("class index {} out of range [0,{})", y_np,
                                 w_np.size()));
  }
  if (!params.g_enabled) return w_np;
  Vector out = Vector::Constant(w_np.size(), params.lambda);
  out(y_np) = 0.0;
  return out;
}

Vector ObfuscateRecord(const ObfuscatorModel& model, const Vector& x, int y_np,
                       const PrivacyParams& params,
                       std::int64_t record_index) {
  params.Validate();
  const Matrix v = Encode(model, Matrix(x));
  const Vector w_np = ApplyG(Classify(model, v).col(0), y_np, params);
  Rng rng = RecordNoiseRng(params.noise_seed, record_index);
  const Vector w_p = ApplyF(RestHead(model, v).col(0), params, rng);
  return Decode(model, Matrix(w_np), Matrix(w_p)).col(0);
}

data::Dataset ObfuscateDataset(const ObfuscatorModel& model,
                               const data::Dataset& ds,
                               const PrivacyParams& params) {
  params.Validate();
  ds.Validate();
  if (ds.width() != model.arch.input_dim()) {
    throw UsageError(fmt::format("dataset width {} != model input {}",
                                 ds.width(), model.arch.input_dim()));
  }
  data::Dataset out;
  out.column_map = ds.column_map;
  out.y_private = ds.y_private;
  out.y_nonprivate = ds.y_nonprivate;
  out.features.resize(ds.width(), ds.size());

  constexpr Eigen::Index kChunk = 2048;
  for (Eigen::Index start = 0; start < ds.size(); start += kChunk) {
    const Eigen::Index n = std::min<Eigen::Index>(kChunk, ds.size() - start);
    const Matrix v = Encode(model, ds.features.middleCols(start, n));
    Matrix w_np = Classify(model, v);
    Matrix w_p = RestHead(model, v);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index r = start + i;
      w_np.col(i) = ApplyG(w_np.col(i), ds.y_nonprivate[r], params);
      Rng rng = RecordNoiseRng(params.noise_seed, r);
      w_p.col(i) = ApplyF(w_p.col(i), params, rng);
    }
    out.features.middleCols(start, n) = Decode(model, w_np, w_p);
  }
  return out;
}

}  // namespace obfx
