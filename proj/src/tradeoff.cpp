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

#include "obfx/tradeoff.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <sstream>
#include <charconv>
#include <ostream>
#include <tuple>

#include <fmt/format.h>

#include "obfx/error.hpp"
#include "obfx/rng.hpp"
#include "text_util.hpp"

namespace obfx {

std::string_view AdversaryName(AdversaryType a) {
  return a == AdversaryType::kWeak ? "weak" : "strong";
}

std::optional<AdversaryType> ParseAdversary(std::string_view name) {
  if (name == "weak") return AdversaryType::kWeak;
  if (name == "strong") return AdversaryType::kStrong;
  return std::nullopt;
}

std::string_view SchemeName(Scheme s) {
  return s == Scheme::kProposed ? "proposed" : "gaussian_input";
}

std::optional<Scheme> ParseScheme(std::string_view name) {
  if (name == "proposed") return Scheme::kProposed;
  if (name == "gaussian_input") return Scheme::kGaussianInput;
  return std::nullopt;
}

std::string_view OriginName(Origin o) {
  return o == Origin::kZero ? "zero" : "half";
}

std::uint64_t CellSeed(std::uint64_t base, double k, double lambda,
                       bool g_enabled) {
  return DeriveSeed(DeriveSeed(base, std::bit_cast<std::uint64_t>(k)),
                    std::bit_cast<std::uint64_t>(lambda),
                    g_enabled ? 1 : 0);
}

namespace {

constexpr std::uint64_t kBaselineTag = 0x6761757373ULL;

ProbeConfig WithSeed(const ProbeConfig& base, std::uint64_t seed) {
  ProbeConfig c = base;
  c.hyper.seed = seed;
  return c;
}

Probe TrainWeakProbe(const SweepSplits& splits, const SweepOptions& options) {
  return TrainProbe(
      WithSeed(options.probe, DeriveSeed(options.seed, kStreamProbe, 0)),
      splits.aux, Target::kPrivate);
}

TradeoffPoint ProposedCell(const ObfuscatorModel& model,
                           const SweepSplits& splits, double k, double lambda,
                           bool g_enabled, const SweepOptions& options,
                           const Probe* weak_probe) {
  const std::uint64_t cell = CellSeed(options.seed, k, lambda, g_enabled);
  PrivacyParams privacy;
  privacy.noise_multiplier = k;
  privacy.lambda = lambda;
  privacy.g_enabled = g_enabled;
  privacy.f_enabled = true;
  privacy.noise_seed = DeriveSeed(cell, kStreamNoise, 0);

  PrivacyParams test_privacy = privacy;
  test_privacy.noise_seed = DeriveSeed(cell, kStreamNoise, 3);
  const data::Dataset obf_test =
      ObfuscateDataset(model, splits.test, test_privacy);

  TradeoffPoint p;
  p.k = k;
  p.lambda = lambda;
  p.g_enabled = g_enabled;
  p.seed = cell;
  p.adversary = options.adversary;
  p.eval_mode = options.eval_mode;
  p.scheme = Scheme::kProposed;

  if (options.adversary == AdversaryType::kWeak) {
    p.leakage = weak_probe != nullptr
                    ? EvalAccuracy(*weak_probe, obf_test, Target::kPrivate)
                    : EvalAccuracy(TrainWeakProbe(splits, options), obf_test,
                                   Target::kPrivate);
  } else {
    p.leakage =
        StrongAdversaryProtocol(
            model, privacy, splits.aux, obf_test,
            WithSeed(options.probe, DeriveSeed(cell, kStreamProbe, 0)))
            .accuracy;
  }
  const UtilityResult u = UtilityProtocol(
      model, privacy, splits.provider, splits.test,
      WithSeed(options.probe, DeriveSeed(cell, kStreamProbe, 1)));
  p.utility = u.Get(options.eval_mode).accuracy;
  return p;
}

TradeoffPoint BaselineCell(const SweepSplits& splits, double variance,
                           const SweepOptions& options,
                           const Probe* weak_probe) {
  const std::uint64_t cell =
      DeriveSeed(CellSeed(options.seed, variance, 0.0, false), kBaselineTag);
  const data::Dataset noisy_test =
      AddInputNoise(splits.test, variance, DeriveSeed(cell, kStreamNoise, 3));

  TradeoffPoint p;
  p.k = variance;
  p.lambda = 0.0;
  p.g_enabled = false;
  p.seed = cell;
  p.adversary = options.adversary;
  p.eval_mode = options.eval_mode;
  p.scheme = Scheme::kGaussianInput;

  if (options.adversary == AdversaryType::kWeak) {
    p.leakage = weak_probe != nullptr
                    ? EvalAccuracy(*weak_probe, noisy_test, Target::kPrivate)
                    : EvalAccuracy(TrainWeakProbe(splits, options), noisy_test,
                                   Target::kPrivate);
  } else {
    const data::Dataset noisy_aux =
        AddInputNoise(splits.aux, variance, DeriveSeed(cell, kStreamNoise, 1));
    const Probe adv = TrainProbe(
        WithSeed(options.probe, DeriveSeed(cell, kStreamProbe, 0)), noisy_aux,
        Target::kPrivate);
    p.leakage = EvalAccuracy(adv, noisy_test, Target::kPrivate);
  }
  const data::Dataset noisy_provider = AddInputNoise(
      splits.provider, variance, DeriveSeed(cell, kStreamNoise, 0));
  const Probe util = TrainProbe(
      WithSeed(options.probe, DeriveSeed(cell, kStreamProbe, 1)),
      noisy_provider, Target::kNonPrivate);
  p.utility = EvalAccuracy(
      util, options.eval_mode == UtilityEval::kOriginal ? splits.test : noisy_test,
      Target::kNonPrivate);
  return p;
}

std::vector<double> Unique(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  return out;
}

using CellKey = std::tuple<double, double, bool, int, int, int, std::uint64_t>;

CellKey KeyOf(const TradeoffPoint& p) {
  return {p.k, p.lambda, p.g_enabled, static_cast<int>(p.adversary),
          static_cast<int>(p.eval_mode), static_cast<int>(p.scheme), p.seed};
}

struct Cell {
  double k;
  double lambda;
  bool g_enabled;
  std::uint64_t seed;
};

// Runs the cells, reusing and extending the manifest when one is configured.
template <typename Eval>
std::vector<TradeoffPoint> RunCells(const std::vector<Cell>& cells,
                                    const SweepOptions& options, Scheme scheme,
                                    Eval eval) {
  std::map<CellKey, TradeoffPoint> done;
  if (!options.manifest_path.empty() &&
      std::filesystem::exists(options.manifest_path)) {
    for (const auto& p : LoadCurveCsv(options.manifest_path).points) {
      done.emplace(KeyOf(p), p);
    }
  }
  std::ofstream manifest;
  if (!options.manifest_path.empty()) {
    const bool fresh = !std::filesystem::exists(options.manifest_path) ||
                       std::filesystem::file_size(options.manifest_path) == 0;
    manifest.open(options.manifest_path, std::ios::binary | std::ios::app);
    if (!manifest) {
      throw IoError(fmt::format("cannot open manifest '{}'", options.manifest_path));
    }
    if (fresh) {
      WriteCurveCsv(TradeoffCurve{}, manifest);
      manifest.flush();
    }
  }

  auto key_for = [&](const Cell& c) {
    TradeoffPoint probe;
    probe.k = c.k;
    probe.lambda = c.lambda;
    probe.g_enabled = c.g_enabled;
    probe.adversary = options.adversary;
    probe.eval_mode = options.eval_mode;
    probe.scheme = scheme;
    probe.seed = c.seed;
    return KeyOf(probe);
  };

  std::vector<TradeoffPoint> out(cells.size());
  std::vector<size_t> pending;
  for (size_t i = 0; i < cells.size(); ++i) {
    auto it = done.find(key_for(cells[i]));
    if (it != done.end()) {
      out[i] = it->second;
    } else {
      pending.push_back(i);
    }
  }
  const size_t jobs = static_cast<size_t>(std::max(1, options.jobs));
  for (size_t wave = 0; wave < pending.size(); wave += jobs) {
    const size_t end = std::min(pending.size(), wave + jobs);
    if (jobs == 1) {
      out[pending[wave]] = eval(cells[pending[wave]]);
    } else {
      std::vector<std::future<TradeoffPoint>> futures;
      for (size_t j = wave; j < end; ++j) {
        futures.push_back(std::async(std::launch::async, eval, cells[pending[j]]));
      }
      for (size_t j = wave; j < end; ++j) out[pending[j]] = futures[j - wave].get();
    }
    if (manifest.is_open()) {
      TradeoffCurve chunk;
      for (size_t j = wave; j < end; ++j) chunk.points.push_back(out[pending[j]]);
      std::ostringstream rows;
      WriteCurveCsv(chunk, rows);
      const std::string text = rows.str();
      manifest << text.substr(text.find('\n') + 1);
      manifest.flush();
    }
  }
  return out;
}

}  // namespace

TradeoffPoint EvaluateProposedPoint(const ObfuscatorModel& model,
                                    const SweepSplits& splits, double k,
                                    double lambda, bool g_enabled,
                                    const SweepOptions& options) {
  return ProposedCell(model, splits, k, lambda, g_enabled, options, nullptr);
}

TradeoffPoint EvaluateBaselinePoint(const SweepSplits& splits, double variance,
                                    const SweepOptions& options) {
  return BaselineCell(splits, variance, options, nullptr);
}

TradeoffCurve Sweep(const ObfuscatorModel& model, const SweepSplits& splits,
                    const SweepOptions& options) {
  const std::vector<double> ks = Unique(options.k_grid);
  const std::vector<double> lambdas = Unique(options.lambda_grid);
  if (ks.empty() || lambdas.empty()) throw UsageError("sweep grids must be nonempty");
  std::vector<Cell> cells;
  if (options.include_reference) {
    cells.push_back({0.0, 0.0, false, CellSeed(options.seed, 0.0, 0.0, false)});
  }
  for (double lambda : lambdas) {
    for (double k : ks) {
      PrivacyParams check;
      check.noise_multiplier = k;
      check.lambda = lambda;
      check.Validate();
      cells.push_back({k, lambda, true, CellSeed(options.seed, k, lambda, true)});
    }
  }
  std::optional<Probe> weak;
  auto eval = [&](const Cell& c) {
    return ProposedCell(model, splits, c.k, c.lambda, c.g_enabled, options,
                        weak ? &*weak : nullptr);
  };
  if (options.adversary == AdversaryType::kWeak) {
    weak = TrainWeakProbe(splits, options);
  }
  TradeoffCurve curve;
  curve.points = RunCells(cells, options, Scheme::kProposed, eval);
  curve.scheme = Scheme::kProposed;
  curve.adversary = options.adversary;
  curve.eval_mode = options.eval_mode;
  curve.k_grid = ks;
  curve.lambda_grid = lambdas;
  return curve;
}

data::Dataset AddInputNoise(const data::Dataset& ds, double variance,
                            std::uint64_t seed) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw UsageError("input noise variance must be finite and >= 0");
  }
  data::Dataset out = ds;
  if (variance == 0.0) return out;
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  for (int r = 0; r < out.size(); ++r) {
    Rng rng = RecordNoiseRng(seed, r);
    for (int c = 0; c < out.width(); ++c) out.features(c, r) += normal(rng);
  }
  return out;
}

TradeoffCurve GaussianInputBaseline(const SweepSplits& splits,
                                    const SweepOptions& options) {
  const std::vector<double> vars = Unique(options.k_grid);
  if (vars.empty()) throw UsageError("baseline variance grid must be nonempty");
  std::vector<Cell> cells;
  for (double v : vars) {
    cells.push_back(
        {v, 0.0, false,
         DeriveSeed(CellSeed(options.seed, v, 0.0, false), kBaselineTag)});
  }
  std::optional<Probe> weak;
  if (options.adversary == AdversaryType::kWeak) {
    weak = TrainWeakProbe(splits, options);
  }
  auto eval = [&](const Cell& c) {
    return BaselineCell(splits, c.k, options, weak ? &*weak : nullptr);
  };
  TradeoffCurve curve;
  curve.points = RunCells(cells, options, Scheme::kGaussianInput, eval);
  curve.scheme = Scheme::kGaussianInput;
  curve.adversary = options.adversary;
  curve.eval_mode = options.eval_mode;
  curve.k_grid = vars;
  curve.lambda_grid = {0.0};
  return curve;
}

// ---------------------------------------------------------------------------

namespace {

double Cross(const HullVertex& o, const HullVertex& a, const HullVertex& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

HullVertex OriginPoint(Origin origin) {
  return origin == Origin::kZero ? HullVertex{0.0, 0.0} : HullVertex{0.5, 0.5};
}

}  // namespace

std::vector<HullVertex> UpperHull(std::span<const TradeoffPoint> points,
                                  Origin origin) {
  if (points.empty()) throw UsageError("cannot take the hull of an empty curve");
  const HullVertex o = OriginPoint(origin);
  std::vector<HullVertex> pts;
  pts.push_back(o);
  double x_max = o.x;
  for (const auto& p : points) {
    HullVertex v{std::max(p.leakage, o.x), std::max(p.utility, o.y)};
    x_max = std::max(x_max, v.x);
    pts.push_back(v);
  }
  pts.push_back({x_max, o.y});
  // Sort by x, highest y first within equal x, then keep one vertex per x.
  std::sort(pts.begin(), pts.end(), [](const HullVertex& a, const HullVertex& b) {
    return a.x != b.x ? a.x < b.x : a.y > b.y;
  });
  std::vector<HullVertex> uniq;
  for (const auto& p : pts) {
    if (uniq.empty() || uniq.back().x != p.x) uniq.push_back(p);
  }
  std::vector<HullVertex> hull;
  for (const auto& p : uniq) {
    while (hull.size() >= 2 && Cross(hull[hull.size() - 2], hull.back(), p) >= 0.0) {
      hull.pop_back();
    }
    hull.push_back(p);
  }
  return hull;
}

double ConvexHullAuc(std::span<const TradeoffPoint> points, Origin origin) {
  const std::vector<HullVertex> hull = UpperHull(points, origin);
  const HullVertex o = OriginPoint(origin);
  double area = 0.0;
  for (size_t i = 1; i < hull.size(); ++i) {
    area += (hull[i].x - hull[i - 1].x) *
            (0.5 * (hull[i].y + hull[i - 1].y) - o.y);
  }
  if (origin == Origin::kHalf) area /= 0.25;
  return area;
}

double SpanHullAuc(std::span<const TradeoffPoint> points) {
  if (points.empty()) throw UsageError("cannot take the hull of an empty curve");
  if (points.size() == 1) return points[0].leakage * points[0].utility;
  std::vector<HullVertex> pts;
  for (const auto& p : points) pts.push_back({p.leakage, p.utility});
  std::sort(pts.begin(), pts.end(), [](const HullVertex& a, const HullVertex& b) {
    return a.x != b.x ? a.x < b.x : a.y > b.y;
  });
  std::vector<HullVertex> hull;
  for (const auto& p : pts) {
    if (!hull.empty() && hull.back().x == p.x) continue;
    while (hull.size() >= 2 && Cross(hull[hull.size() - 2], hull.back(), p) >= 0.0) {
      hull.pop_back();
    }
    hull.push_back(p);
  }
  double area = 0.0;
  for (size_t i = 1; i < hull.size(); ++i) {
    area += (hull[i].x - hull[i - 1].x) * 0.5 * (hull[i].y + hull[i - 1].y);
  }
  return area;
}

// ---------------------------------------------------------------------------

void WriteCurveCsv(const TradeoffCurve& curve, std::ostream& out) {
  out << "k,lambda,leakage,utility,adversary_type,eval_mode,seed,g_enabled,"
         "scheme\n";
  for (const auto& p : curve.points) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", FormatDouble(p.k),
                       FormatDouble(p.lambda), FormatDouble(p.leakage),
                       FormatDouble(p.utility), AdversaryName(p.adversary),
                       UtilityEvalName(p.eval_mode), p.seed,
                       p.g_enabled ? 1 : 0, SchemeName(p.scheme));
  }
}

void SaveCurveCsv(const TradeoffCurve& curve, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  WriteCurveCsv(curve, out);
  if (!out) throw IoError(fmt::format("write to '{}' failed", path));
}

TradeoffCurve ReadCurveCsv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) ||
      Trim(line) !=
          "k,lambda,leakage,utility,adversary_type,eval_mode,seed,g_enabled,scheme") {
    throw DataError(fmt::format("{}:1: not a tradeoff curve file", source));
  }
  TradeoffCurve curve;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = Trim(line);
    if (view.empty()) continue;
    const auto f = SplitFields(view, ',');
    if (f.size() != 9) {
      throw DataError(fmt::format("{}:{}: expected 9 fields", source, line_no));
    }
    TradeoffPoint p;
    auto num = [&](std::string_view s) {
      auto v = ParseDouble(s);
      if (!v) throw DataError(fmt::format("{}:{}: bad number '{}'", source, line_no, s));
      return *v;
    };
    p.k = num(f[0]);
    p.lambda = num(f[1]);
    p.leakage = num(f[2]);
    p.utility = num(f[3]);
    auto adv = ParseAdversary(f[4]);
    auto mode = ParseUtilityEval(f[5]);
    auto scheme = ParseScheme(f[8]);
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(f[6].data(), f[6].data() + f[6].size(), seed);
    if (!adv || !mode || !scheme || ec != std::errc() ||
        ptr != f[6].data() + f[6].size() || (f[7] != "0" && f[7] != "1")) {
      throw DataError(fmt::format("{}:{}: malformed row", source, line_no));
    }
    p.adversary = *adv;
    p.eval_mode = *mode;
    p.scheme = *scheme;
    p.seed = seed;
    p.g_enabled = f[7] == "1";
    curve.points.push_back(p);
  }
  if (!curve.points.empty()) {
    const auto& first = curve.points.front();
    curve.scheme = first.scheme;
    curve.adversary = first.adversary;
    curve.eval_mode = first.eval_mode;
    for (const auto& p : curve.points) {
      const bool grid_point = p.scheme == Scheme::kGaussianInput || p.g_enabled;
      if (!grid_point) continue;
      if (std::find(curve.k_grid.begin(), curve.k_grid.end(), p.k) == curve.k_grid.end()) {
        curve.k_grid.push_back(p.k);
      }
      if (std::find(curve.lambda_grid.begin(), curve.lambda_grid.end(), p.lambda) ==
          curve.lambda_grid.end()) {
        curve.lambda_grid.push_back(p.lambda);
      }
    }
  }
  return curve;
}

TradeoffCurve LoadCurveCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  return ReadCurveCsv(in, path);
}

void WriteHullData(std::span<const TradeoffPoint> points, Origin origin,
                   std::ostream& out) {
  for (const auto& v : UpperHull(points, origin)) {
    out << FormatDouble(v.x) << ' ' << FormatDouble(v.y) << '\n';
  }
}

}  // namespace obfx
