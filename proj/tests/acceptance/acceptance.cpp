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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
//
// Usage: acceptance <obfx binary> <adult data dir> <work dir>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "../unit/gradcheck.hpp"
#include "obfx/data.hpp"
#include "obfx/nn.hpp"
#include "obfx/obfuscator.hpp"
#include "obfx/rng.hpp"
#include "obfx/tradeoff.hpp"

namespace {

namespace fs = std::filesystem;
using obfx::nn::Matrix;

struct Context {
  std::string cli;
  fs::path adult;
  fs::path work;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the CLI in the work dir; returns its exit status and stdout.
int RunCli(const Context& c, const std::string& args, std::string* out = nullptr) {
  const std::string cmd =
      fmt::format("'{}' -w '{}' {} 2>>'{}'", c.cli, c.work.string(), args,
                  (c.work / "stderr.log").string());
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return -1;
  std::string text;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) text.append(buf, n);
  const int status = pclose(pipe);
  if (out != nullptr) *out = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool BitwiseEqual(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

Matrix RandomUnit(int rows, int cols, std::uint64_t seed) {
  obfx::Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

// ---- 1: gradient exactness ---------------------------------------------------

Outcome GradientExactness() {
  using namespace obfx::nn;
  double worst = 0.0;
  int checked = 0;
  for (int net = 0; net < 50; ++net) {
    obfx::Rng rng(obfx::DeriveSeed(777, net));
    const NetworkSpec spec = obfx::testing::RandomSpec(rng);
    NetworkParams p = InitNetwork(spec, obfx::DeriveSeed(778, net), 0.5);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix x(spec.input_dim(), 3), w(spec.output_dim(), 3);
    ForwardCache cache;
    for (int attempt = 0;; ++attempt) {
      if (attempt == 100) return {false, fmt::format("network {}: no kink-free input", net)};
      for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
      Forward(spec, p, x, Mode::kEval, nullptr, &cache);
      if (obfx::testing::KinkMargin(spec, cache) > 1e-3) break;
    }
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);
    auto objective = [&] {
      return Forward(spec, p, x, Mode::kEval, nullptr, nullptr).cwiseProduct(w).sum();
    };
    Matrix dx;
    const GradientBundle g = Backward(spec, p, cache, w, &dx);
    for (std::int64_t i = 0; i < ParamCount(p); ++i) {
      const double num = obfx::testing::CentralDifference(ParamAt(p, i), objective);
      worst = std::max(worst, obfx::testing::RelativeError(GradAt(g, i), num));
      ++checked;
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double num = obfx::testing::CentralDifference(x.data()[i], objective);
      worst = std::max(worst, obfx::testing::RelativeError(dx.data()[i], num));
      ++checked;
    }
  }
  return {worst < 1e-4, fmt::format("50 networks, {} coordinates, max rel err {:.3e}",
                                    checked, worst)};
}

// ---- 2: gradient routing -----------------------------------------------------

Outcome GradientRouting() {
  double worst = 0.0;
  for (int point = 0; point < 20; ++point) {
    obfx::ObfuscatorModel m =
        obfx::InitObfuscator(obfx::CategoricalArch(), obfx::DeriveSeed(31, point));
    obfx::Rng rng(obfx::DeriveSeed(32, point));
    std::normal_distribution<double> normal(0.0, 0.1);
    for (auto* net : {&m.encoder, &m.classifier, &m.rest, &m.decoder}) {
      for (auto& l : net->layers) {
        for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = normal(rng);
      }
    }
    const Matrix x = RandomUnit(102, 16, obfx::DeriveSeed(33, point));
    std::vector<int> y(16);
    for (int& v : y) v = static_cast<int>(rng() & 1u);
    const obfx::ObfuscatorGradients g = obfx::ComputeGradients(
        m, x, y, obfx::LossTerm::kClassifier, obfx::nn::Mode::kEval, nullptr);
    worst = std::max({worst, g.decoder.MaxAbs(), g.rest.MaxAbs()});
  }
  return {worst < 1e-12,
          fmt::format("20 points, max |dL_C/d(decoder, rest)| = {:.3e}", worst)};
}

// ---- 3: synthetic end to end -------------------------------------------------

Outcome SyntheticEndToEnd(obfx::ObfuscatorModel* trained, obfx::data::Dataset* val_out) {
  obfx::data::SynthSpec s;
  s.n = 4096;
  s.correlation = 0.9;
  s.seed = 2024;
  const obfx::data::Dataset all = obfx::data::SynthGenerate(s);
  auto [train, val] = obfx::data::Split(all, {0.9, 5});
  obfx::TrainHyper h;
  h.epochs = 50;
  h.seed = 6;
  const auto t0 = std::chrono::steady_clock::now();
  obfx::TrainResult r = obfx::TrainObfuscator(obfx::CategoricalArch(all.width()), train, val, h);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double drop = r.history.initial_val_ae / r.model.meta.best_val_ae;
  const double acc = obfx::Score(r.model, val).accuracy;
  *trained = std::move(r.model);
  *val_out = std::move(val);
  return {drop >= 10.0 && acc >= 0.9,
          fmt::format("val L_ae drop {:.1f}x in {} epochs, val accuracy {:.4f}, {:.0f} s", drop,
                      r.history.epochs.size(), acc, secs)};
}

// ---- Adult pipeline ------------------------------------------------------------

struct Adult {
  bool ready = false;
  std::string error;
  obfx::TradeoffCurve weak, strong, baseline;
  double majority = 0.0;
  double agreement = -1.0;
};

Adult RunAdult(const Context& c) {
  Adult a;
  const std::string raw = fmt::format("'{}' '{}'", (c.adult / "adult.data").string(),
                                      (c.adult / "adult.test").string());
  if (RunCli(c, "preprocess " + raw) != 0) return a.error = "preprocess failed", a;
  if (RunCli(c, "train") != 0) return a.error = "train failed", a;
  std::string text;
  if (RunCli(c, "decorrelate", &text) != 0) return a.error = "decorrelate failed", a;
  if (std::sscanf(text.c_str(), "agreement %lf", &a.agreement) != 1) {
    return a.error = "cannot parse decorrelate output", a;
  }
  if (RunCli(c, "sweep --adversary weak --baseline") != 0) return a.error = "weak sweep failed", a;
  if (RunCli(c, "sweep --adversary strong --k-grid 0,5,20,60,200") != 0) {
    return a.error = "strong sweep failed", a;
  }
  a.weak = obfx::LoadCurveCsv((c.work / "curve_weak.csv").string());
  a.strong = obfx::LoadCurveCsv((c.work / "curve_strong.csv").string());
  a.baseline = obfx::LoadCurveCsv((c.work / "curve_weak.baseline.csv").string());
  a.majority = obfx::data::MajorityRate(
      obfx::data::LoadDatasetCsv((c.work / "test.csv").string()).y_private);
  a.ready = true;
  return a;
}

// g-enabled leakage by k.
std::map<double, double> LeakageByK(const obfx::TradeoffCurve& curve) {
  std::map<double, double> out;
  for (const auto& p : curve.points) {
    if (p.g_enabled) out[p.k] = p.leakage;
  }
  return out;
}

Outcome Decorrelation(const Adult& a) {
  return {a.agreement >= 0.9, fmt::format("agreement {:.4f}", a.agreement)};
}

Outcome Saturation(const Adult& a) {
  const auto leak = LeakageByK(a.weak);
  std::string trace;
  bool monotone = true;
  double prev = INFINITY;
  for (double k : {0.0, 5.0, 20.0, 60.0, 200.0}) {
    const auto it = leak.find(k);
    if (it == leak.end()) return {false, fmt::format("k={} missing from the weak curve", k)};
    trace += fmt::format("{}{}:{:.4f}", trace.empty() ? "" : " ", k, it->second);
    if (it->second > prev + 0.01) monotone = false;
    prev = it->second;
  }
  const double gap = std::abs(leak.at(200.0) - a.majority);
  return {monotone && gap <= 0.03,
          fmt::format("leakage {}; monotone(+-1pt) {}; |leak(200) - majority {:.4f}| = {:.4f}",
                      trace, monotone ? "yes" : "no", a.majority, gap)};
}

Outcome StrongBeatsWeak(const Adult& a) {
  const auto weak = LeakageByK(a.weak);
  const auto strong = LeakageByK(a.strong);
  double worst = INFINITY;
  std::string trace;
  for (const auto& [k, s] : strong) {
    const auto it = weak.find(k);
    if (it == weak.end()) return {false, fmt::format("k={} missing from the weak curve", k)};
    worst = std::min(worst, s - it->second);
    trace += fmt::format("{}{}:{:+.4f}", trace.empty() ? "" : " ", k, s - it->second);
  }
  return {worst >= -0.01, fmt::format("strong - weak by k: {}", trace)};
}

Outcome AdultAuc(const Adult& a) {
  const double proposed = obfx::ConvexHullAuc(a.weak, obfx::Origin::kZero);
  const double baseline = obfx::ConvexHullAuc(a.baseline, obfx::Origin::kZero);
  const bool in_band = std::abs(proposed - 0.4183) <= 0.05;
  const bool ordered = proposed > baseline;
  return {in_band && ordered,
          fmt::format("proposed {:.4f} (band 0.4183+-0.05: {}), gaussian input {:.4f} "
                      "(proposed > baseline: {})",
                      proposed, in_band ? "yes" : "no", baseline, ordered ? "yes" : "no")};
}

// ---- 8: parameter count ------------------------------------------------------

Outcome ParamCount(const Context& c) {
  std::string text;
  if (RunCli(c, "params", &text) != 0) return {false, "params command failed"};
  const std::int64_t total = obfx::CategoricalArch().ParamCount();
  const double dev = std::abs(static_cast<double>(total - obfx::kReportedObfuscatorParams)) /
                     static_cast<double>(obfx::kReportedObfuscatorParams);
  const bool printed = text.find(fmt::format("{}", total)) != std::string::npos &&
                       text.find("deviation") != std::string::npos;
  return {printed && dev <= 0.05,
          fmt::format("computed {} vs reported {} ({:.2f}%), deviation line printed: {}", total,
                      obfx::kReportedObfuscatorParams, 100.0 * dev, printed ? "yes" : "no")};
}

// ---- 9: reproducibility ------------------------------------------------------

Outcome Reproducibility(const Context& c, const obfx::ObfuscatorModel& synth) {
  std::vector<std::string> mismatched;
  auto twice = [&](const std::string& args, const std::vector<std::string>& files) {
    std::map<std::string, std::string> first;
    if (RunCli(c, args) != 0) return mismatched.push_back(args + " (exit)");
    for (const auto& f : files) first[f] = Slurp(c.work / f);
    if (RunCli(c, args) != 0) return mismatched.push_back(args + " (exit)");
    for (const auto& f : files) {
      if (first[f].empty() || Slurp(c.work / f) != first[f]) mismatched.push_back(f);
    }
  };
  const std::string raw = fmt::format("'{}' '{}'", (c.adult / "adult.data").string(),
                                      (c.adult / "adult.test").string());
  twice("preprocess " + raw, {"train.csv", "test.csv", "column_map.json"});
  twice("train", {"model.obf", "history.csv"});
  twice("obfuscate -k 20", {"obfuscated.csv"});
  twice("eval weak -k 20", {"eval_weak.csv"});
  for (const char* name : {"repro_a", "repro_b"}) {
    fs::remove(c.work / fmt::format("{}.manifest.csv", name));
    if (RunCli(c, fmt::format("sweep --k-grid 0,60 -o '{}'",
                              (c.work / fmt::format("{}.csv", name)).string())) != 0) {
      mismatched.push_back("sweep (exit)");
    }
  }
  if (Slurp(c.work / "repro_a.csv") != Slurp(c.work / "repro_b.csv")) {
    mismatched.push_back("fresh sweep curve");
  }

  // Model files: in-memory model vs loaded copy, and the Adult model file.
  const fs::path path = c.work / "synth.obf";
  obfx::SaveModel(synth, path.string());
  const obfx::ObfuscatorModel back = obfx::LoadModel(path.string());
  const Matrix xs = RandomUnit(synth.arch.input_dim(), 100, 5);
  const bool synth_ok = BitwiseEqual(obfx::Reconstruct(synth, xs), obfx::Reconstruct(back, xs));
  const obfx::ObfuscatorModel adult = obfx::LoadModel((c.work / "model.obf").string());
  obfx::SaveModel(adult, (c.work / "model_copy.obf").string());
  const obfx::ObfuscatorModel adult2 = obfx::LoadModel((c.work / "model_copy.obf").string());
  const Matrix xa = RandomUnit(adult.arch.input_dim(), 100, 6);
  const bool adult_ok =
      Slurp(c.work / "model.obf") == Slurp(c.work / "model_copy.obf") &&
      BitwiseEqual(obfx::Reconstruct(adult, xa), obfx::Reconstruct(adult2, xa));

  std::string detail = mismatched.empty()
                           ? "reruns byte-identical"
                           : "differs: " + fmt::format("{}", fmt::join(mismatched, ", "));
  detail += fmt::format("; save/load forward bitwise on 100 inputs: synthetic {}, adult {}",
                        synth_ok ? "yes" : "no", adult_ok ? "yes" : "no");
  return {mismatched.empty() && synth_ok && adult_ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::fprintf(stderr, "usage: %s <obfx binary> <adult data dir> <work dir>\n", argv[0]);
    return 2;
  }
  Context c{argv[1], argv[2], argv[3]};
  fs::remove_all(c.work);
  fs::create_directories(c.work);

  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };
  auto guarded = [](auto&& fn) -> Outcome {
    try {
      return fn();
    } catch (const std::exception& e) {
      return {false, std::string("error: ") + e.what()};
    }
  };

  report(1, "gradient exactness", guarded(GradientExactness));
  report(2, "gradient routing", guarded(GradientRouting));
  obfx::ObfuscatorModel synth;
  obfx::data::Dataset synth_val;
  report(3, "synthetic end-to-end", guarded([&] { return SyntheticEndToEnd(&synth, &synth_val); }));

  Adult adult;
  try {
    adult = RunAdult(c);
  } catch (const std::exception& e) {
    adult.error = e.what();
  }
  auto adult_guarded = [&](auto&& fn) -> Outcome {
    if (!adult.ready) return {false, "adult pipeline: " + adult.error};
    return fn(adult);
  };
  report(4, "decorrelation", adult_guarded(Decorrelation));
  report(5, "privacy saturation", adult_guarded(Saturation));
  report(6, "strong >= weak", adult_guarded(StrongBeatsWeak));
  report(7, "adult auc", adult_guarded(AdultAuc));
  report(8, "parameter count", guarded([&] { return ParamCount(c); }));
  report(9, "reproducibility", guarded([&] { return Reproducibility(c, synth); }));

  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
