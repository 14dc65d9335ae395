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

#include "obfx/obfx.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <new>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "obfx/data.hpp"
#include "obfx/error.hpp"
#include "obfx/eval.hpp"
#include "obfx/obfuscator.hpp"
#include "obfx/privatize.hpp"
#include "obfx/rng.hpp"
#include "obfx/tradeoff.hpp"

struct obfx_dataset {
  obfx::data::Dataset ds;
};
struct obfx_model {
  obfx::ObfuscatorModel model;
};
struct obfx_curve {
  obfx::TradeoffCurve curve;
};

namespace {

namespace fs = std::filesystem;
using obfx::data::Dataset;

constexpr int kTargetEncodedWidth = 106;
constexpr int kTargetFeatureWidth = 102;

thread_local std::string g_last_error;

obfx_status Fail(obfx_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename Fn>
obfx_status Guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return OBFX_OK;
  } catch (const obfx::Error& e) {
    switch (e.kind()) {
      case obfx::ErrorKind::kUsage: return Fail(OBFX_E_USAGE, e.what());
      case obfx::ErrorKind::kData: return Fail(OBFX_E_DATA, e.what());
      case obfx::ErrorKind::kNumeric: return Fail(OBFX_E_NUMERIC, e.what());
      case obfx::ErrorKind::kIo: return Fail(OBFX_E_IO, e.what());
    }
    return Fail(OBFX_E_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(OBFX_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(OBFX_E_INTERNAL, e.what());
  }
}

void Require(bool ok, const char* what) {
  if (!ok) throw obfx::UsageError(what);
}

obfx::Target ToTarget(obfx_target t) {
  return t == OBFX_TARGET_PRIVATE ? obfx::Target::kPrivate
                                  : obfx::Target::kNonPrivate;
}

obfx::UtilityEval ToEval(obfx_eval_mode m) {
  return m == OBFX_EVAL_ORIGINAL ? obfx::UtilityEval::kOriginal
                                 : obfx::UtilityEval::kObfuscated;
}

obfx::PrivacyParams ToPrivacy(const obfx_privacy& p) {
  obfx::PrivacyParams out;
  out.noise_multiplier = p.noise_multiplier;
  out.lambda = p.lambda;
  out.g_enabled = p.g_enabled != 0;
  out.f_enabled = p.f_enabled != 0;
  out.noise_seed = p.noise_seed;
  out.Validate();
  return out;
}

obfx::ProbeConfig ToProbe(const obfx_probe_options& p, int width) {
  obfx::ProbeConfig c = obfx::ProbeConfig::ForWidth(width);
  c.hyper.learning_rate = p.learning_rate;
  c.hyper.epochs = p.epochs;
  c.hyper.batch_size = p.batch_size;
  c.hyper.patience = p.patience;
  c.hyper.validation_fraction = p.validation_fraction;
  c.hyper.seed = p.seed;
  c.hyper.Validate();
  return c;
}

obfx::SweepOptions ToSweep(const obfx_sweep_options& o, int width) {
  Require(o.k_grid != nullptr && o.k_count > 0, "k grid must be nonempty");
  obfx::SweepOptions s;
  s.k_grid.assign(o.k_grid, o.k_grid + o.k_count);
  if (o.lambda_grid != nullptr && o.lambda_count > 0) {
    s.lambda_grid.assign(o.lambda_grid, o.lambda_grid + o.lambda_count);
  }
  s.adversary = o.adversary == OBFX_ADVERSARY_WEAK ? obfx::AdversaryType::kWeak
                                                   : obfx::AdversaryType::kStrong;
  s.eval_mode = ToEval(o.eval_mode);
  s.probe = ToProbe(o.probe, width);
  s.seed = o.seed;
  s.include_reference = o.include_reference != 0;
  if (o.manifest_path != nullptr) s.manifest_path = o.manifest_path;
  s.jobs = std::max(1, o.jobs);
  return s;
}

obfx_result ToResult(const obfx::ProtocolResult& r, obfx_protocol protocol) {
  obfx_result out{};
  out.protocol = protocol;
  out.accuracy = r.accuracy;
  out.baseline = r.baseline;
  out.probe_seed = r.probe_seed;
  out.probe_train_records = r.probe_train_records;
  out.probe_epochs = r.probe_epochs;
  out.eval_mode = r.eval_mode == obfx::UtilityEval::kOriginal
                      ? OBFX_EVAL_ORIGINAL
                      : OBFX_EVAL_OBFUSCATED;
  return out;
}

std::vector<obfx::data::AdultRecord> ReadAdultFile(
    const std::string& path, obfx::data::AdultParseStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw obfx::IoError(fmt::format("cannot open '{}'", path));
  return obfx::data::ParseAdultCsv(in, false, path, stats);
}

}  // namespace

extern "C" {

const char* obfx_last_error(void) { return g_last_error.c_str(); }

const char* obfx_version(void) { return "1.0.0"; }

// ---- datasets ---------------------------------------------------------------

obfx_status obfx_preprocess_adult(const char* const* raw_paths, size_t n_paths,
                                  double train_fraction, uint64_t seed,
                                  const char* out_dir,
                                  obfx_preprocess_report* report) {
  return Guard([&] {
    Require(raw_paths != nullptr && n_paths > 0, "no raw input files");
    Require(out_dir != nullptr, "output directory is required");
    std::vector<obfx::data::AdultRecord> records;
    obfx::data::AdultParseStats total;
    std::vector<std::string> sources;
    for (size_t i = 0; i < n_paths; ++i) {
      Require(raw_paths[i] != nullptr, "null input path");
      obfx::data::AdultParseStats stats;
      auto part = ReadAdultFile(raw_paths[i], &stats);
      total.rows_read += stats.rows_read;
      total.rows_missing += stats.rows_missing;
      records.insert(records.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
      sources.push_back(fs::path(raw_paths[i]).filename().string());
    }
    const auto [train_idx, test_idx] = obfx::data::SplitIndices(
        static_cast<int>(records.size()), {train_fraction, seed});
    std::vector<obfx::data::AdultRecord> train_rec, test_rec;
    for (int i : train_idx) train_rec.push_back(records[i]);
    for (int i : test_idx) test_rec.push_back(records[i]);
    const auto enc = obfx::data::AdultEncoding::Fit(records, train_rec);
    const Dataset train = enc.Transform(train_rec);
    const Dataset test = enc.Transform(test_rec);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
      throw obfx::IoError(fmt::format("cannot create '{}': {}", out_dir, ec.message()));
    }
    const fs::path dir(out_dir);
    obfx::data::SaveDatasetCsv(train, (dir / "train.csv").string());
    obfx::data::SaveDatasetCsv(test, (dir / "test.csv").string());

    nlohmann::ordered_json manifest;
    manifest["sources"] = sources;
    manifest["records_read"] = total.rows_read;
    manifest["records_dropped_missing"] = total.rows_missing;
    manifest["records_kept"] = records.size();
    manifest["train_fraction"] = train_fraction;
    manifest["split_seed"] = seed;
    manifest["train_size"] = train.size();
    manifest["test_size"] = test.size();
    manifest["encoded_width"] = {{"target", kTargetEncodedWidth},
                                 {"actual", enc.encoded_width()}};
    manifest["feature_width"] = {{"target", kTargetFeatureWidth},
                                 {"actual", enc.feature_width()}};
    manifest["private_label"] = {
        {"attribute", "sex"},
        {"classes", enc.vocabulary(obfx::data::kAdultSexField)}};
    manifest["nonprivate_label"] = {
        {"attribute", "income"},
        {"classes", enc.vocabulary(obfx::data::kAdultIncomeField)}};
    auto& cols = manifest["columns"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < enc.columns().size(); ++i) {
      const auto& c = enc.columns()[i];
      nlohmann::ordered_json col;
      col["index"] = i;
      col["name"] = c.Name();
      col["attribute"] = c.attribute;
      if (c.kind == obfx::data::ColumnKind::kContinuous) {
        col["kind"] = "continuous";
        col["min"] = c.min;
        col["max"] = c.max;
      } else {
        col["kind"] = "category";
        col["category"] = c.category;
      }
      cols.push_back(std::move(col));
    }
    const std::string map_path = (dir / "column_map.json").string();
    std::ofstream out(map_path, std::ios::binary);
    if (!out) throw obfx::IoError(fmt::format("cannot open '{}'", map_path));
    out << manifest.dump(2) << '\n';
    if (!out) throw obfx::IoError(fmt::format("write to '{}' failed", map_path));

    if (report != nullptr) {
      report->records_read = total.rows_read;
      report->records_dropped = total.rows_missing;
      report->train_size = train.size();
      report->test_size = test.size();
      report->encoded_width = enc.encoded_width();
      report->feature_width = enc.feature_width();
    }
  });
}

obfx_status obfx_dataset_load_csv(const char* path, obfx_dataset** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    *out = new obfx_dataset{obfx::data::LoadDatasetCsv(path)};
  });
}

obfx_status obfx_dataset_save_csv(const obfx_dataset* ds, const char* path) {
  return Guard([&] {
    Require(ds != nullptr && path != nullptr, "null argument");
    obfx::data::SaveDatasetCsv(ds->ds, path);
  });
}

void obfx_dataset_free(obfx_dataset* ds) { delete ds; }

int64_t obfx_dataset_size(const obfx_dataset* ds) {
  return ds == nullptr ? 0 : ds->ds.size();
}

int32_t obfx_dataset_width(const obfx_dataset* ds) {
  return ds == nullptr ? 0 : ds->ds.width();
}

obfx_status obfx_dataset_majority(const obfx_dataset* ds, obfx_target target,
                                  double* rate) {
  return Guard([&] {
    Require(ds != nullptr && rate != nullptr, "null argument");
    *rate = obfx::data::MajorityRate(obfx::Labels(ds->ds, ToTarget(target)));
  });
}

obfx_status obfx_dataset_rows(const obfx_dataset* ds, int64_t first,
                              int64_t count, double* out) {
  return Guard([&] {
    Require(ds != nullptr && out != nullptr, "null argument");
    Require(first >= 0 && count >= 0 && first + count <= ds->ds.size(),
            "row range out of bounds");
    const int w = ds->ds.width();
    for (int64_t r = 0; r < count; ++r) {
      for (int c = 0; c < w; ++c) out[r * w + c] = ds->ds.features(c, first + r);
    }
  });
}

obfx_status obfx_dataset_split(const obfx_dataset* ds, double fraction,
                               uint64_t seed, obfx_dataset** first,
                               obfx_dataset** second) {
  return Guard([&] {
    Require(ds != nullptr && first != nullptr && second != nullptr,
            "null argument");
    auto [a, b] = obfx::data::Split(ds->ds, {fraction, seed});
    auto* ha = new obfx_dataset{std::move(a)};
    *second = new obfx_dataset{std::move(b)};
    *first = ha;
  });
}

obfx_status obfx_synth_generate(int64_t n, double correlation, uint64_t seed,
                                obfx_dataset** out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    Require(n > 0 && n <= INT32_MAX, "record count out of range");
    obfx::data::SynthSpec spec;
    spec.n = static_cast<int>(n);
    spec.correlation = correlation;
    spec.seed = seed;
    *out = new obfx_dataset{obfx::data::SynthGenerate(spec)};
  });
}

// ---- obfuscator -------------------------------------------------------------

void obfx_train_options_default(obfx_train_options* opts) {
  if (opts == nullptr) return;
  const obfx::TrainHyper h;
  opts->learning_rate = h.learning_rate;
  opts->epochs = h.epochs;
  opts->batch_size = h.batch_size;
  opts->patience = h.patience;
  opts->validation_fraction = h.validation_fraction;
  opts->seed = h.seed;
}

obfx_status obfx_train(const obfx_dataset* train, const obfx_train_options* opts,
                       const char* history_path, obfx_model** out,
                       obfx_train_report* report) {
  return Guard([&] {
    Require(train != nullptr && opts != nullptr && out != nullptr,
            "null argument");
    obfx::TrainHyper h;
    h.learning_rate = opts->learning_rate;
    h.epochs = opts->epochs;
    h.batch_size = opts->batch_size;
    h.patience = opts->patience;
    h.validation_fraction = opts->validation_fraction;
    h.seed = opts->seed;
    h.Validate();
    Require(h.validation_fraction > 0.0,
            "obfuscator training needs a validation fraction > 0");
    auto [fit, val] = obfx::data::Split(
        train->ds, {1.0 - h.validation_fraction,
                    obfx::DeriveSeed(h.seed, obfx::kStreamSplit)});
    obfx::TrainResult result = obfx::TrainObfuscator(
        obfx::CategoricalArch(train->ds.width()), fit, val, h);
    if (history_path != nullptr) {
      std::ofstream hist(history_path, std::ios::binary);
      if (!hist) throw obfx::IoError(fmt::format("cannot open '{}'", history_path));
      obfx::WriteHistoryCsv(result.history, hist);
      if (!hist) throw obfx::IoError(fmt::format("write to '{}' failed", history_path));
    }
    if (report != nullptr) {
      report->epochs_run = static_cast<int32_t>(result.history.epochs.size());
      report->best_epoch = result.history.best_epoch;
      report->early_stopped = result.history.early_stopped ? 1 : 0;
      report->initial_val_ae = result.history.initial_val_ae;
      report->best_val_ae = result.model.meta.best_val_ae;
      report->val_accuracy = result.model.meta.val_accuracy;
    }
    *out = new obfx_model{std::move(result.model)};
  });
}

obfx_status obfx_model_save(const obfx_model* model, const char* path) {
  return Guard([&] {
    Require(model != nullptr && path != nullptr, "null argument");
    obfx::SaveModel(model->model, path);
  });
}

obfx_status obfx_model_load(const char* path, obfx_model** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    *out = new obfx_model{obfx::LoadModel(path)};
  });
}

void obfx_model_free(obfx_model* model) { delete model; }

int32_t obfx_model_input_dim(const obfx_model* model) {
  return model == nullptr ? 0 : model->model.arch.input_dim();
}

int64_t obfx_model_param_count(const obfx_model* model) {
  return model == nullptr ? 0 : model->model.arch.ParamCount();
}

obfx_status obfx_model_reconstruct(const obfx_model* model,
                                   const obfx_dataset* ds, obfx_dataset** out) {
  return Guard([&] {
    Require(model != nullptr && ds != nullptr && out != nullptr,
            "null argument");
    obfx::PrivacyParams identity;
    identity.noise_multiplier = 0.0;
    identity.g_enabled = false;
    identity.f_enabled = false;
    *out = new obfx_dataset{obfx::ObfuscateDataset(model->model, ds->ds, identity)};
  });
}

obfx_status obfx_obfuscator_params(int32_t input_dim, obfx_param_counts* out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    Require(input_dim > 0, "input width must be positive");
    const obfx::ObfuscatorArch arch = obfx::CategoricalArch(input_dim);
    out->encoder = obfx::nn::ParamCount(arch.encoder);
    out->classifier = obfx::nn::ParamCount(arch.classifier);
    out->rest = obfx::nn::ParamCount(arch.rest);
    out->decoder = obfx::nn::ParamCount(arch.decoder);
    out->total = arch.ParamCount();
    out->reported = obfx::kReportedObfuscatorParams;
  });
}

// ---- privatization ----------------------------------------------------------

void obfx_privacy_default(obfx_privacy* p) {
  if (p == nullptr) return;
  const obfx::PrivacyParams d;
  p->noise_multiplier = d.noise_multiplier;
  p->lambda = d.lambda;
  p->g_enabled = d.g_enabled ? 1 : 0;
  p->f_enabled = d.f_enabled ? 1 : 0;
  p->noise_seed = d.noise_seed;
}

obfx_status obfx_obfuscate(const obfx_model* model, const obfx_dataset* ds,
                           const obfx_privacy* privacy, obfx_dataset** out) {
  return Guard([&] {
    Require(model != nullptr && ds != nullptr && privacy != nullptr &&
                out != nullptr,
            "null argument");
    *out = new obfx_dataset{
        obfx::ObfuscateDataset(model->model, ds->ds, ToPrivacy(*privacy))};
  });
}

// ---- evaluation -------------------------------------------------------------

void obfx_probe_options_default(obfx_probe_options* opts) {
  if (opts == nullptr) return;
  const obfx::TrainHyper h = obfx::ProbeConfig::DefaultProbeHyper();
  opts->learning_rate = h.learning_rate;
  opts->epochs = h.epochs;
  opts->batch_size = h.batch_size;
  opts->patience = h.patience;
  opts->validation_fraction = h.validation_fraction;
  opts->seed = h.seed;
}

obfx_status obfx_evaluate(obfx_protocol protocol, const obfx_model* model,
                          const obfx_privacy* privacy,
                          const obfx_dataset* provider, const obfx_dataset* aux,
                          const obfx_dataset* test, obfx_target target,
                          obfx_eval_mode eval_mode,
                          const obfx_probe_options* probe, obfx_result* out) {
  return Guard([&] {
    Require(test != nullptr && probe != nullptr && out != nullptr,
            "null argument");
    const obfx::ProbeConfig cfg = ToProbe(*probe, test->ds.width());
    if (protocol == OBFX_PROTOCOL_BASELINE) {
      Require(provider != nullptr, "baseline needs training records");
      *out = ToResult(
          obfx::BaselineProtocol(provider->ds, test->ds, ToTarget(target), cfg),
          protocol);
      return;
    }
    Require(model != nullptr && privacy != nullptr, "protocol needs a model");
    const obfx::PrivacyParams pp = ToPrivacy(*privacy);
    switch (protocol) {
      case OBFX_PROTOCOL_WEAK: {
        Require(aux != nullptr, "weak adversary needs auxiliary records");
        const Dataset obf_test = obfx::ObfuscateDataset(model->model, test->ds, pp);
        *out = ToResult(obfx::WeakAdversaryProtocol(aux->ds, obf_test, pp, cfg),
                        protocol);
        break;
      }
      case OBFX_PROTOCOL_STRONG: {
        Require(aux != nullptr, "strong adversary needs auxiliary records");
        const Dataset obf_test = obfx::ObfuscateDataset(model->model, test->ds, pp);
        *out = ToResult(obfx::StrongAdversaryProtocol(model->model, pp, aux->ds,
                                                      obf_test, cfg),
                        protocol);
        break;
      }
      case OBFX_PROTOCOL_UTILITY: {
        Require(provider != nullptr, "utility needs provider records");
        const obfx::UtilityResult u =
            obfx::UtilityProtocol(model->model, pp, provider->ds, test->ds, cfg);
        *out = ToResult(u.Get(ToEval(eval_mode)), protocol);
        break;
      }
      default:
        throw obfx::UsageError(fmt::format("unknown protocol {}",
                                           static_cast<int>(protocol)));
    }
  });
}

obfx_status obfx_decorrelation_test(const obfx_model* model,
                                    const obfx_dataset* provider,
                                    const obfx_dataset* test, double lambda,
                                    const obfx_probe_options* probe,
                                    uint64_t seed, obfx_decorrelation* out) {
  return Guard([&] {
    Require(model != nullptr && provider != nullptr && test != nullptr &&
                probe != nullptr && out != nullptr,
            "null argument");
    obfx::PrivacyParams pp;
    pp.noise_multiplier = 0.0;
    pp.lambda = lambda;
    pp.g_enabled = true;
    pp.f_enabled = false;
    pp.noise_seed = obfx::DeriveSeed(seed, obfx::kStreamNoise);
    const obfx::UtilityResult u = obfx::UtilityProtocol(
        model->model, pp, provider->ds, test->ds,
        ToProbe(*probe, test->ds.width()));
    const obfx::DecorrelationResult r =
        obfx::DecorrelationTest(model->model, test->ds, lambda, u.probe, seed);
    *out = obfx_decorrelation{};
    out->agreement = r.agreement;
    out->utility_accuracy = u.on_original.accuracy;
    for (int i = 0; i < 2; ++i) {
      out->injected[i] = r.injected[i];
      for (int j = 0; j < 2; ++j) out->counts[i][j] = r.counts[i][j];
      for (int b = 0; b < 10; ++b) out->histogram[i][b] = r.histogram[i][b];
    }
  });
}

// ---- tradeoff ---------------------------------------------------------------

obfx_status obfx_sweep(const obfx_model* model, const obfx_dataset* provider,
                       const obfx_dataset* aux, const obfx_dataset* test,
                       const obfx_sweep_options* opts, obfx_curve** out) {
  return Guard([&] {
    Require(model != nullptr && provider != nullptr && aux != nullptr &&
                test != nullptr && opts != nullptr && out != nullptr,
            "null argument");
    const obfx::SweepSplits splits{provider->ds, aux->ds, test->ds};
    *out = new obfx_curve{
        obfx::Sweep(model->model, splits, ToSweep(*opts, test->ds.width()))};
  });
}

obfx_status obfx_gaussian_baseline(const obfx_dataset* provider,
                                   const obfx_dataset* aux,
                                   const obfx_dataset* test,
                                   const obfx_sweep_options* opts,
                                   obfx_curve** out) {
  return Guard([&] {
    Require(provider != nullptr && aux != nullptr && test != nullptr &&
                opts != nullptr && out != nullptr,
            "null argument");
    const obfx::SweepSplits splits{provider->ds, aux->ds, test->ds};
    *out = new obfx_curve{obfx::GaussianInputBaseline(
        splits, ToSweep(*opts, test->ds.width()))};
  });
}

obfx_status obfx_curve_load_csv(const char* path, obfx_curve** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    *out = new obfx_curve{obfx::LoadCurveCsv(path)};
  });
}

obfx_status obfx_curve_save_csv(const obfx_curve* curve, const char* path) {
  return Guard([&] {
    Require(curve != nullptr && path != nullptr, "null argument");
    obfx::SaveCurveCsv(curve->curve, path);
  });
}

obfx_status obfx_curve_save_hull(const obfx_curve* curve, obfx_origin origin,
                                 const char* path) {
  return Guard([&] {
    Require(curve != nullptr && path != nullptr, "null argument");
    std::ofstream o(path, std::ios::binary);
    if (!o) throw obfx::IoError(fmt::format("cannot open '{}'", path));
    obfx::WriteHullData(curve->curve.points,
                        origin == OBFX_ORIGIN_ZERO ? obfx::Origin::kZero
                                                   : obfx::Origin::kHalf,
                        o);
    if (!o) throw obfx::IoError(fmt::format("write to '{}' failed", path));
  });
}

void obfx_curve_free(obfx_curve* curve) { delete curve; }

size_t obfx_curve_size(const obfx_curve* curve) {
  return curve == nullptr ? 0 : curve->curve.points.size();
}

obfx_status obfx_curve_point(const obfx_curve* curve, size_t i,
                             obfx_point* out) {
  return Guard([&] {
    Require(curve != nullptr && out != nullptr, "null argument");
    Require(i < curve->curve.points.size(), "point index out of range");
    const auto& p = curve->curve.points[i];
    out->k = p.k;
    out->lambda = p.lambda;
    out->leakage = p.leakage;
    out->utility = p.utility;
    out->g_enabled = p.g_enabled ? 1 : 0;
    out->seed = p.seed;
    out->gaussian_input = p.scheme == obfx::Scheme::kGaussianInput ? 1 : 0;
  });
}

obfx_status obfx_curve_auc(const obfx_curve* curve, obfx_origin origin,
                           double* out) {
  return Guard([&] {
    Require(curve != nullptr && out != nullptr, "null argument");
    *out = obfx::ConvexHullAuc(curve->curve, origin == OBFX_ORIGIN_ZERO
                                                 ? obfx::Origin::kZero
                                                 : obfx::Origin::kHalf);
  });
}

}  // extern "C"
