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

// Utility-privacy sweeps and convex-hull AUC scoring.

#ifndef OBFX_TRADEOFF_HPP_
#define OBFX_TRADEOFF_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "obfx/data.hpp"
#include "obfx/eval.hpp"
#include "obfx/obfuscator.hpp"
#include "obfx/privatize.hpp"

namespace obfx {

enum class AdversaryType { kWeak, kStrong };
enum class Scheme { kProposed, kGaussianInput };

std::string_view AdversaryName(AdversaryType a);
std::optional<AdversaryType> ParseAdversary(std::string_view name);
std::string_view SchemeName(Scheme s);
std::optional<Scheme> ParseScheme(std::string_view name);

struct TradeoffPoint {
  double leakage = 0.0;  // adversary accuracy on y_private
  double utility = 0.0;  // utility-provider accuracy on y_nonprivate
  // Noise multiplier k for the proposed scheme, input noise variance for the
  // Gaussian baseline.
  double k = 0.0;
  double lambda = kDefaultLambda;
  bool g_enabled = true;
  std::uint64_t seed = 0;
  AdversaryType adversary = AdversaryType::kWeak;
  UtilityEval eval_mode = UtilityEval::kOriginal;
  Scheme scheme = Scheme::kProposed;

  bool operator==(const TradeoffPoint&) const = default;
};

struct TradeoffCurve {
  std::vector<TradeoffPoint> points;
  Scheme scheme = Scheme::kProposed;
  AdversaryType adversary = AdversaryType::kWeak;
  UtilityEval eval_mode = UtilityEval::kOriginal;
  std::vector<double> k_grid;
  std::vector<double> lambda_grid;

  bool operator==(const TradeoffCurve&) const = default;
};

// Records available to a sweep. `provider` is what the data provider
// releases (and the utility provider trains on), `aux` is the adversary's
// similar-but-disjoint data and `test` is held out from both.
struct SweepSplits {
  const data::Dataset& provider;
  const data::Dataset& aux;
  const data::Dataset& test;
};

struct SweepOptions {
  std::vector<double> k_grid = {0, 5, 10, 15, 20, 40, 60, 100, 200};
  std::vector<double> lambda_grid = {kDefaultLambda};
  AdversaryType adversary = AdversaryType::kWeak;
  UtilityEval eval_mode = UtilityEval::kOriginal;
  ProbeConfig probe;
  std::uint64_t seed = 0;
  // Adds the k = 0, g-disabled reference corner.
  bool include_reference = true;
  // When non-empty, completed points are appended here and skipped on rerun.
  std::string manifest_path;
  int jobs = 1;
};

// Seed of one grid cell; a function of the base seed and the cell's settings
// only, so a cell evaluates identically in any grid.
std::uint64_t CellSeed(std::uint64_t base, double k, double lambda,
                       bool g_enabled);

TradeoffPoint EvaluateProposedPoint(const ObfuscatorModel& model,
                                    const SweepSplits& splits, double k,
                                    double lambda, bool g_enabled,
                                    const SweepOptions& options);

TradeoffCurve Sweep(const ObfuscatorModel& model, const SweepSplits& splits,
                    const SweepOptions& options);

// Adds N(0, variance) to every feature, independently per record.
data::Dataset AddInputNoise(const data::Dataset& ds, double variance,
                            std::uint64_t seed);

TradeoffPoint EvaluateBaselinePoint(const SweepSplits& splits, double variance,
                                    const SweepOptions& options);

// Sweeps the input-noise variance over options.k_grid.
TradeoffCurve GaussianInputBaseline(const SweepSplits& splits,
                                    const SweepOptions& options);

// ---------------------------------------------------------------------------
// Convex-hull AUC.
//
// The curve's region is the convex hull of its points together with the
// origin and the floor point (x_max, origin_y); the AUC is the area between
// the hull's upper boundary and the floor y = origin_y. Convention kZero uses
// the origin (0,0); kHalf uses (0.5,0.5) and divides by the 0.5 x 0.5 box.
// Points are clamped to lie at or above/right of the origin.

enum class Origin { kZero, kHalf };

std::string_view OriginName(Origin o);

struct HullVertex {
  double x = 0.0;
  double y = 0.0;
};

std::vector<HullVertex> UpperHull(std::span<const TradeoffPoint> points,
                                  Origin origin);
double ConvexHullAuc(std::span<const TradeoffPoint> points, Origin origin);
inline double ConvexHullAuc(const TradeoffCurve& curve, Origin origin) {
  return ConvexHullAuc(curve.points, origin);
}

// Area under the upper hull of the points alone, over [x_min, x_max] with a
// floor at y = 0 (no origin anchor). A single point scores the rectangle
// [0, x] x [0, y].
double SpanHullAuc(std::span<const TradeoffPoint> points);

// CSV with header
//   k,lambda,leakage,utility,adversary_type,eval_mode,seed,g_enabled,scheme
void WriteCurveCsv(const TradeoffCurve& curve, std::ostream& out);
void SaveCurveCsv(const TradeoffCurve& curve, const std::string& path);
TradeoffCurve ReadCurveCsv(std::istream& in, const std::string& source);
TradeoffCurve LoadCurveCsv(const std::string& path);
// "x y" lines of the upper hull for plotting tools.
void WriteHullData(std::span<const TradeoffPoint> points, Origin origin,
                   std::ostream& out);

}  // namespace obfx

#endif  // OBFX_TRADEOFF_HPP_
