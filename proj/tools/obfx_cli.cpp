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

// obfx command-line driver. Talks to the library through the C API only.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "CLI11.hpp"
#include "obfx/obfx.h"

namespace {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct Failure {
  int code;
  std::string message;
};

int ExitFor(obfx_status s) {
  switch (s) {
    case OBFX_OK: return kOk;
    case OBFX_E_USAGE: return kUsage;
    case OBFX_E_NUMERIC: return kNumeric;
    default: return kData;
  }
}

void Check(obfx_status s) {
  if (s != OBFX_OK) throw Failure{ExitFor(s), obfx_last_error()};
}

[[noreturn]] void UsageFail(const std::string& msg) { throw Failure{kUsage, msg}; }

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Dataset = std::unique_ptr<obfx_dataset, Deleter<obfx_dataset, obfx_dataset_free>>;
using Model = std::unique_ptr<obfx_model, Deleter<obfx_model, obfx_model_free>>;
using Curve = std::unique_ptr<obfx_curve, Deleter<obfx_curve, obfx_curve_free>>;

Dataset LoadDataset(const std::string& path) {
  obfx_dataset* ds = nullptr;
  Check(obfx_dataset_load_csv(path.c_str(), &ds));
  return Dataset(ds);
}

Model LoadModel(const std::string& path) {
  obfx_model* m = nullptr;
  Check(obfx_model_load(path.c_str(), &m));
  return Model(m);
}

std::vector<double> ParseList(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    const std::string tok = item.substr(b, e - b + 1);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) {
      UsageFail(fmt::format("bad number '{}' in {}", tok, what));
    }
    out.push_back(v);
  }
  if (out.empty()) UsageFail(fmt::format("{} must be nonempty", what));
  return out;
}

// ---- configuration ----------------------------------------------------------

// INI file: [paths] [data] [train] [privacy] [probe] [sweep]. Command-line
// flags override file values, which override the defaults below.
struct Config {
  std::string work_dir = ".";
  double train_fraction = 0.8;
  std::uint64_t split_seed = 0;
  std::uint64_t partition_seed = 1;

  obfx_train_options train{};
  obfx_privacy privacy{};
  obfx_probe_options probe{};

  std::vector<double> k_grid = {0, 5, 10, 15, 20, 40, 60, 100, 200};
  std::vector<double> lambda_grid = {-3000};
  std::string adversary = "weak";
  std::string eval_mode = "original";
  std::uint64_t sweep_seed = 0;
  int jobs = 1;
  std::uint64_t decorrelation_seed = 0;

  Config() {
    obfx_train_options_default(&train);
    obfx_privacy_default(&privacy);
    obfx_probe_options_default(&probe);
    if (const char* env = std::getenv("OBF_WORKDIR"); env != nullptr && *env) {
      work_dir = env;
    }
  }

  std::string Path(const std::string& name) const {
    return (fs::path(work_dir) / name).string();
  }
};

template <typename T>
void Read(const pt::ptree& tree, const char* key, T& dst) {
  try {
    if (auto v = tree.get_optional<T>(key)) dst = *v;
  } catch (const pt::ptree_error& e) {
    UsageFail(fmt::format("config key '{}': {}", key, e.what()));
  }
}

void ReadFlag(const pt::ptree& tree, const char* key, int32_t& dst) {
  bool v = dst != 0;
  Read(tree, key, v);
  dst = v ? 1 : 0;
}

Config LoadConfig(const std::string& path) {
  Config c;
  if (path.empty()) return c;
  if (!fs::exists(path)) UsageFail(fmt::format("config file '{}' not found", path));
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    UsageFail(fmt::format("config: {}", e.what()));
  }
  Read(tree, "paths.work_dir", c.work_dir);
  Read(tree, "data.train_fraction", c.train_fraction);
  Read(tree, "data.split_seed", c.split_seed);
  Read(tree, "data.partition_seed", c.partition_seed);

  Read(tree, "train.learning_rate", c.train.learning_rate);
  Read(tree, "train.epochs", c.train.epochs);
  Read(tree, "train.batch_size", c.train.batch_size);
  Read(tree, "train.patience", c.train.patience);
  Read(tree, "train.validation_fraction", c.train.validation_fraction);
  Read(tree, "train.seed", c.train.seed);

  Read(tree, "privacy.k", c.privacy.noise_multiplier);
  Read(tree, "privacy.lambda", c.privacy.lambda);
  ReadFlag(tree, "privacy.g_enabled", c.privacy.g_enabled);
  ReadFlag(tree, "privacy.f_enabled", c.privacy.f_enabled);
  Read(tree, "privacy.noise_seed", c.privacy.noise_seed);

  Read(tree, "probe.learning_rate", c.probe.learning_rate);
  Read(tree, "probe.epochs", c.probe.epochs);
  Read(tree, "probe.batch_size", c.probe.batch_size);
  Read(tree, "probe.patience", c.probe.patience);
  Read(tree, "probe.validation_fraction", c.probe.validation_fraction);
  Read(tree, "probe.seed", c.probe.seed);

  std::string grid;
  if (auto v = tree.get_optional<std::string>("sweep.k_grid")) {
    c.k_grid = ParseList(*v, "sweep.k_grid");
  }
  if (auto v = tree.get_optional<std::string>("sweep.lambda_grid")) {
    c.lambda_grid = ParseList(*v, "sweep.lambda_grid");
  }
  Read(tree, "sweep.adversary", c.adversary);
  Read(tree, "sweep.eval_mode", c.eval_mode);
  Read(tree, "sweep.seed", c.sweep_seed);
  Read(tree, "sweep.jobs", c.jobs);
  Read(tree, "decorrelation.seed", c.decorrelation_seed);
  return c;
}

obfx_eval_mode ParseEvalMode(const std::string& s) {
  if (s == "original") return OBFX_EVAL_ORIGINAL;
  if (s == "obfuscated") return OBFX_EVAL_OBFUSCATED;
  UsageFail(fmt::format("unknown eval mode '{}' (original|obfuscated)", s));
}

const char* EvalModeName(obfx_eval_mode m) {
  return m == OBFX_EVAL_ORIGINAL ? "original" : "obfuscated";
}

obfx_adversary ParseAdversary(const std::string& s) {
  if (s == "weak") return OBFX_ADVERSARY_WEAK;
  if (s == "strong") return OBFX_ADVERSARY_STRONG;
  UsageFail(fmt::format("unknown adversary '{}' (weak|strong)", s));
}

std::string Num(double v) { return fmt::format("{:.17g}", v); }

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kData, fmt::format("cannot open '{}' for writing", path)};
  out << text;
  if (!out) throw Failure{kData, fmt::format("write to '{}' failed", path)};
}

// The training split is halved: the provider half trains the obfuscator and
// the utility provider, the other half is the adversary's auxiliary data.
struct Splits {
  Dataset provider;
  Dataset aux;
};

Splits PartitionTrain(const obfx_dataset* train, const Config& c) {
  obfx_dataset* a = nullptr;
  obfx_dataset* b = nullptr;
  Check(obfx_dataset_split(train, 0.5, c.partition_seed, &a, &b));
  return {Dataset(a), Dataset(b)};
}

// ---- shared options -----------------------------------------------------------

struct Common {
  std::string config_path;
  std::optional<std::string> work_dir;
};

struct DataPaths {
  std::string train;
  std::string test;
  std::string model;
};

Config Resolve(const Common& common) {
  Config c = LoadConfig(common.config_path);
  if (common.work_dir) c.work_dir = *common.work_dir;
  return c;
}

std::string Or(const std::string& value, const std::string& fallback) {
  return value.empty() ? fallback : value;
}

void AddPrivacyFlags(CLI::App* cmd, std::optional<double>& k,
                     std::optional<double>& lambda,
                     std::optional<std::uint64_t>& noise_seed, bool& no_f,
                     bool& no_g) {
  cmd->add_option("-k,--noise-multiplier", k, "noise variance multiplier k (variance = k*nu)");
  cmd->add_option("--lambda", lambda, "clamp value for the non-true class (<= 0)");
  cmd->add_option("--noise-seed", noise_seed, "seed of the noise draw");
  cmd->add_flag("--no-f", no_f, "disable the rest-head noise");
  cmd->add_flag("--no-g", no_g, "disable the classifier-head clamp");
}

void ApplyPrivacy(Config& c, const std::optional<double>& k,
                  const std::optional<double>& lambda,
                  const std::optional<std::uint64_t>& noise_seed, bool no_f,
                  bool no_g) {
  if (k) c.privacy.noise_multiplier = *k;
  if (lambda) c.privacy.lambda = *lambda;
  if (noise_seed) c.privacy.noise_seed = *noise_seed;
  if (no_f) c.privacy.f_enabled = 0;
  if (no_g) c.privacy.g_enabled = 0;
}

// ---- commands -----------------------------------------------------------------

int CmdPreprocess(const Config& c, const std::vector<std::string>& raw,
                  const std::string& out_dir) {
  std::vector<const char*> paths;
  for (const auto& p : raw) {
    if (!fs::exists(p)) throw Failure{kData, fmt::format("input '{}' not found", p)};
    paths.push_back(p.c_str());
  }
  obfx_preprocess_report r{};
  Check(obfx_preprocess_adult(paths.data(), paths.size(), c.train_fraction,
                              c.split_seed, out_dir.c_str(), &r));
  fmt::print("records read {}, dropped (missing) {}, kept {}\n", r.records_read,
             r.records_dropped, r.records_read - r.records_dropped);
  fmt::print("encoded width {} (target 106), feature width {} (target 102)\n",
             r.encoded_width, r.feature_width);
  fmt::print("train {} / test {} -> {}\n", r.train_size, r.test_size, out_dir);
  return kOk;
}

int CmdTrain(const Config& c, const DataPaths& paths, const std::string& history) {
  Dataset train = LoadDataset(Or(paths.train, c.Path("train.csv")));
  Splits s = PartitionTrain(train.get(), c);
  obfx_model* raw = nullptr;
  obfx_train_report r{};
  const std::string hist = Or(history, c.Path("history.csv"));
  Check(obfx_train(s.provider.get(), &c.train, hist.c_str(), &raw, &r));
  Model model(raw);
  const std::string model_path = Or(paths.model, c.Path("model.obf"));
  Check(obfx_model_save(model.get(), model_path.c_str()));
  fmt::print("epochs {} best {} early_stopped {}\n", r.epochs_run, r.best_epoch,
             r.early_stopped);
  fmt::print("val L_ae {:.6g} -> {:.6g}, classifier accuracy {:.4f}\n",
             r.initial_val_ae, r.best_val_ae, r.val_accuracy);
  fmt::print("model -> {}, history -> {}\n", model_path, hist);
  return kOk;
}

int CmdObfuscate(const Config& c, const DataPaths& paths, const std::string& in,
                 const std::string& out) {
  Model model = LoadModel(Or(paths.model, c.Path("model.obf")));
  Dataset ds = LoadDataset(Or(in, c.Path("test.csv")));
  obfx_dataset* raw = nullptr;
  Check(obfx_obfuscate(model.get(), ds.get(), &c.privacy, &raw));
  Dataset obf(raw);
  const std::string dst = Or(out, c.Path("obfuscated.csv"));
  Check(obfx_dataset_save_csv(obf.get(), dst.c_str()));
  fmt::print("{} records -> {}\n", obfx_dataset_size(obf.get()), dst);
  return kOk;
}

int CmdEval(const Config& c, const DataPaths& paths, const std::string& protocol_name,
            const std::string& target_name, const std::string& out) {
  obfx_protocol protocol;
  if (protocol_name == "weak") protocol = OBFX_PROTOCOL_WEAK;
  else if (protocol_name == "strong") protocol = OBFX_PROTOCOL_STRONG;
  else if (protocol_name == "utility") protocol = OBFX_PROTOCOL_UTILITY;
  else if (protocol_name == "baseline") protocol = OBFX_PROTOCOL_BASELINE;
  else UsageFail(fmt::format("unknown protocol '{}' (weak|strong|utility|baseline)", protocol_name));
  obfx_target target;
  if (target_name == "private") target = OBFX_TARGET_PRIVATE;
  else if (target_name == "nonprivate") target = OBFX_TARGET_NONPRIVATE;
  else UsageFail(fmt::format("unknown target '{}' (private|nonprivate)", target_name));
  const obfx_eval_mode mode = ParseEvalMode(c.eval_mode);

  Dataset train = LoadDataset(Or(paths.train, c.Path("train.csv")));
  Dataset test = LoadDataset(Or(paths.test, c.Path("test.csv")));
  Splits s = PartitionTrain(train.get(), c);
  Model model;
  if (protocol != OBFX_PROTOCOL_BASELINE) {
    model = LoadModel(Or(paths.model, c.Path("model.obf")));
  }
  obfx_result r{};
  Check(obfx_evaluate(protocol, model.get(), &c.privacy, s.provider.get(),
                      s.aux.get(), test.get(), target, mode, &c.probe, &r));
  const bool baseline = protocol == OBFX_PROTOCOL_BASELINE;
  std::string csv =
      "protocol,k,lambda,seed,accuracy,baseline,eval_mode,probe_train_records,"
      "probe_epochs\n";
  csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", protocol_name,
                     baseline ? "0" : Num(c.privacy.noise_multiplier),
                     baseline ? "0" : Num(c.privacy.lambda), r.probe_seed,
                     Num(r.accuracy), Num(r.baseline), EvalModeName(r.eval_mode),
                     r.probe_train_records, r.probe_epochs);
  const std::string dst = Or(out, c.Path(fmt::format("eval_{}.csv", protocol_name)));
  WriteText(dst, csv);
  fmt::print("{} accuracy {:.4f} (majority {:.4f}) -> {}\n", protocol_name,
             r.accuracy, r.baseline, dst);
  return kOk;
}

obfx_sweep_options SweepOptions(const Config& c, const std::string& manifest) {
  obfx_sweep_options o{};
  o.k_grid = c.k_grid.data();
  o.k_count = c.k_grid.size();
  o.lambda_grid = c.lambda_grid.data();
  o.lambda_count = c.lambda_grid.size();
  o.adversary = ParseAdversary(c.adversary);
  o.eval_mode = ParseEvalMode(c.eval_mode);
  o.probe = c.probe;
  o.seed = c.sweep_seed;
  o.include_reference = 1;
  o.manifest_path = manifest.empty() ? nullptr : manifest.c_str();
  o.jobs = c.jobs;
  return o;
}

std::string AucLines(const char* label, const obfx_curve* curve) {
  double zero = 0.0;
  double half = 0.0;
  Check(obfx_curve_auc(curve, OBFX_ORIGIN_ZERO, &zero));
  Check(obfx_curve_auc(curve, OBFX_ORIGIN_HALF, &half));
  return fmt::format("{},zero,{}\n{},half,{}\n", label, Num(zero), label, Num(half));
}

int CmdSweep(const Config& c, const DataPaths& paths, const std::string& out,
             bool with_baseline) {
  ParseAdversary(c.adversary);
  ParseEvalMode(c.eval_mode);
  Dataset train = LoadDataset(Or(paths.train, c.Path("train.csv")));
  Dataset test = LoadDataset(Or(paths.test, c.Path("test.csv")));
  Model model = LoadModel(Or(paths.model, c.Path("model.obf")));
  Splits s = PartitionTrain(train.get(), c);

  const std::string curve_path = Or(out, c.Path(fmt::format("curve_{}.csv", c.adversary)));
  const fs::path stem = fs::path(curve_path).replace_extension();
  const std::string manifest = stem.string() + ".manifest.csv";
  const obfx_sweep_options opts = SweepOptions(c, manifest);

  obfx_curve* raw = nullptr;
  Check(obfx_sweep(model.get(), s.provider.get(), s.aux.get(), test.get(), &opts, &raw));
  Curve curve(raw);
  Check(obfx_curve_save_csv(curve.get(), curve_path.c_str()));
  Check(obfx_curve_save_hull(curve.get(), OBFX_ORIGIN_ZERO,
                             (stem.string() + ".hull_zero.dat").c_str()));
  Check(obfx_curve_save_hull(curve.get(), OBFX_ORIGIN_HALF,
                             (stem.string() + ".hull_half.dat").c_str()));
  std::string report = "scheme,origin,auc\n" + AucLines("proposed", curve.get());

  if (with_baseline) {
    const std::string base_manifest = stem.string() + ".baseline.manifest.csv";
    const obfx_sweep_options bopts = SweepOptions(c, base_manifest);
    obfx_curve* braw = nullptr;
    Check(obfx_gaussian_baseline(s.provider.get(), s.aux.get(), test.get(), &bopts, &braw));
    Curve base(braw);
    Check(obfx_curve_save_csv(base.get(), (stem.string() + ".baseline.csv").c_str()));
    Check(obfx_curve_save_hull(base.get(), OBFX_ORIGIN_ZERO,
                               (stem.string() + ".baseline.hull_zero.dat").c_str()));
    report += AucLines("gaussian_input", base.get());
  }
  WriteText(stem.string() + ".auc.csv", report);
  fmt::print("{} points -> {}\n", obfx_curve_size(curve.get()), curve_path);
  std::fputs(report.c_str(), stdout);
  return kOk;
}

int CmdDecorrelate(const Config& c, const DataPaths& paths) {
  Dataset train = LoadDataset(Or(paths.train, c.Path("train.csv")));
  Dataset test = LoadDataset(Or(paths.test, c.Path("test.csv")));
  Model model = LoadModel(Or(paths.model, c.Path("model.obf")));
  Splits s = PartitionTrain(train.get(), c);
  obfx_decorrelation r{};
  Check(obfx_decorrelation_test(model.get(), s.provider.get(), test.get(),
                                c.privacy.lambda, &c.probe, c.decorrelation_seed, &r));
  fmt::print("agreement {:.4f} (utility probe on original test {:.4f})\n",
             r.agreement, r.utility_accuracy);
  fmt::print("injected 0: {} -> predicted 0/1 {} {}\n", r.injected[0],
             r.counts[0][0], r.counts[0][1]);
  fmt::print("injected 1: {} -> predicted 0/1 {} {}\n", r.injected[1],
             r.counts[1][0], r.counts[1][1]);
  fmt::print("P(class 1) histogram, bins of 0.1\n");
  for (int cls = 0; cls < 2; ++cls) {
    fmt::print("  injected {}:", cls);
    for (int b = 0; b < 10; ++b) fmt::print(" {}", r.histogram[cls][b]);
    fmt::print("\n");
  }
  return kOk;
}

int CmdParams(int input_dim) {
  obfx_param_counts p{};
  Check(obfx_obfuscator_params(input_dim, &p));
  const double dev = 100.0 * static_cast<double>(p.total - p.reported) /
                     static_cast<double>(p.reported);
  fmt::print("{:<12}{:>10}\n", "network", "params");
  fmt::print("{:<12}{:>10}\n", "encoder", p.encoder);
  fmt::print("{:<12}{:>10}\n", "classifier", p.classifier);
  fmt::print("{:<12}{:>10}\n", "rest", p.rest);
  fmt::print("{:<12}{:>10}\n", "decoder", p.decoder);
  fmt::print("{:<12}{:>10}\n", "total", p.total);
  fmt::print("{:<12}{:>10}\n", "reported", p.reported);
  fmt::print("deviation {:+d} ({:+.2f}%) {}\n", p.total - p.reported, dev,
             std::abs(dev) <= 5.0 ? "within 5%" : "OUTSIDE 5%");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adjustable-privacy obfuscation of tabular data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", obfx_version());

  Common common;
  app.add_option("-c,--config", common.config_path, "INI configuration file");
  app.add_option("-w,--workdir", common.work_dir,
                 "work directory (default $OBF_WORKDIR or .)");

  DataPaths paths;
  auto add_paths = [&](CLI::App* cmd, bool train, bool test, bool model) {
    if (train) cmd->add_option("--train", paths.train, "training CSV (default <workdir>/train.csv)");
    if (test) cmd->add_option("--test", paths.test, "test CSV (default <workdir>/test.csv)");
    if (model) cmd->add_option("--model", paths.model, "model file (default <workdir>/model.obf)");
  };

  std::optional<double> k, lambda;
  std::optional<std::uint64_t> noise_seed, seed;
  bool no_f = false, no_g = false;
  std::string out;

  auto* pre = app.add_subcommand("preprocess", "encode and split the raw Adult files");
  std::vector<std::string> raw;
  pre->add_option("raw", raw, "raw adult.data / adult.test files")->required();
  pre->add_option("-o,--out", out, "output directory (default <workdir>)");
  pre->add_option("--seed", seed, "split seed");

  auto* train = app.add_subcommand("train", "train the obfuscator");
  add_paths(train, true, false, true);
  std::string history;
  train->add_option("--history", history, "history CSV (default <workdir>/history.csv)");
  train->add_option("--seed", seed, "training seed");
  std::optional<int> epochs;
  train->add_option("--epochs", epochs, "maximum epochs");

  auto* obf = app.add_subcommand("obfuscate", "obfuscate a dataset");
  add_paths(obf, false, false, true);
  std::string in;
  obf->add_option("-i,--in", in, "input CSV (default <workdir>/test.csv)");
  obf->add_option("-o,--out", out, "output CSV (default <workdir>/obfuscated.csv)");
  AddPrivacyFlags(obf, k, lambda, noise_seed, no_f, no_g);

  auto* eval = app.add_subcommand("eval", "run one measurement protocol");
  add_paths(eval, true, true, true);
  std::string protocol;
  eval->add_option("protocol", protocol, "weak|strong|utility|baseline")->required();
  std::string target = "private";
  eval->add_option("--target", target, "baseline target: private|nonprivate");
  std::optional<std::string> eval_mode;
  eval->add_option("--eval-mode", eval_mode, "utility scoring: original|obfuscated");
  eval->add_option("-o,--out", out, "result CSV");
  eval->add_option("--probe-seed", seed, "probe seed");
  AddPrivacyFlags(eval, k, lambda, noise_seed, no_f, no_g);

  auto* sweep = app.add_subcommand("sweep", "sweep privacy settings and score the curve");
  add_paths(sweep, true, true, true);
  sweep->add_option("-o,--out", out, "curve CSV");
  std::optional<std::string> adversary, k_grid, lambda_grid;
  sweep->add_option("--adversary", adversary, "weak|strong");
  sweep->add_option("--eval-mode", eval_mode, "utility scoring: original|obfuscated");
  sweep->add_option("--k-grid", k_grid, "comma-separated noise multipliers");
  sweep->add_option("--lambda-grid", lambda_grid, "comma-separated clamp values");
  bool with_baseline = false;
  sweep->add_flag("--baseline", with_baseline, "also sweep the Gaussian input-noise baseline");
  std::optional<int> jobs;
  sweep->add_option("-j,--jobs", jobs, "parallel grid cells");
  sweep->add_option("--seed", seed, "sweep seed");

  auto* deco = app.add_subcommand("decorrelate", "inject random classes and check the utility probe");
  add_paths(deco, true, true, true);
  deco->add_option("--lambda", lambda, "clamp value");
  deco->add_option("--seed", seed, "injection seed");

  auto* params = app.add_subcommand("params", "print the obfuscator parameter counts");
  int input_dim = 102;
  params->add_option("--input-dim", input_dim, "feature width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    Config c = Resolve(common);
    if (*pre) {
      if (seed) c.split_seed = *seed;
      return CmdPreprocess(c, raw, Or(out, c.work_dir));
    }
    if (*train) {
      if (seed) c.train.seed = *seed;
      if (epochs) c.train.epochs = *epochs;
      return CmdTrain(c, paths, history);
    }
    if (*obf) {
      ApplyPrivacy(c, k, lambda, noise_seed, no_f, no_g);
      return CmdObfuscate(c, paths, in, out);
    }
    if (*eval) {
      ApplyPrivacy(c, k, lambda, noise_seed, no_f, no_g);
      if (eval_mode) c.eval_mode = *eval_mode;
      if (seed) c.probe.seed = *seed;
      return CmdEval(c, paths, protocol, target, out);
    }
    if (*sweep) {
      if (adversary) c.adversary = *adversary;
      if (eval_mode) c.eval_mode = *eval_mode;
      if (k_grid) c.k_grid = ParseList(*k_grid, "--k-grid");
      if (lambda_grid) c.lambda_grid = ParseList(*lambda_grid, "--lambda-grid");
      if (jobs) c.jobs = *jobs;
      if (seed) c.sweep_seed = *seed;
      return CmdSweep(c, paths, out, with_baseline);
    }
    if (*deco) {
      if (lambda) c.privacy.lambda = *lambda;
      if (seed) c.decorrelation_seed = *seed;
      return CmdDecorrelate(c, paths);
    }
    if (*params) return CmdParams(input_dim);
  } catch (const Failure& f) {
    std::cerr << "obfx: " << f.message << '\n';
    return f.code;
  }
  return kUsage;
}
