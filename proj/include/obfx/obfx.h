/*
 * Copyright 2026 The obfx Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of the obfx shared library.
 *
 * Every function returns an obfx_status. On failure a message is available
 * from obfx_last_error() on the calling thread until its next obfx call.
 * Objects are opaque handles released with the matching *_free function;
 * passing NULL to a *_free function is a no-op.
 */

#ifndef OBFX_OBFX_H_
#define OBFX_OBFX_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OBFX_API __declspec(dllexport)
#else
#define OBFX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum obfx_status {
  OBFX_OK = 0,
  OBFX_E_USAGE = 1,
  OBFX_E_DATA = 2,
  OBFX_E_NUMERIC = 3,
  OBFX_E_IO = 4,
  OBFX_E_INTERNAL = 5
} obfx_status;

typedef struct obfx_dataset obfx_dataset;
typedef struct obfx_model obfx_model;
typedef struct obfx_curve obfx_curve;

typedef enum obfx_target { OBFX_TARGET_PRIVATE = 0, OBFX_TARGET_NONPRIVATE = 1 } obfx_target;
typedef enum obfx_eval_mode { OBFX_EVAL_ORIGINAL = 0, OBFX_EVAL_OBFUSCATED = 1 } obfx_eval_mode;
typedef enum obfx_adversary { OBFX_ADVERSARY_WEAK = 0, OBFX_ADVERSARY_STRONG = 1 } obfx_adversary;
typedef enum obfx_origin { OBFX_ORIGIN_ZERO = 0, OBFX_ORIGIN_HALF = 1 } obfx_origin;
typedef enum obfx_protocol {
  OBFX_PROTOCOL_WEAK = 0,
  OBFX_PROTOCOL_STRONG = 1,
  OBFX_PROTOCOL_UTILITY = 2,
  OBFX_PROTOCOL_BASELINE = 3
} obfx_protocol;

OBFX_API const char* obfx_last_error(void);
OBFX_API const char* obfx_version(void);

/* ---- datasets ---------------------------------------------------------- */

typedef struct obfx_preprocess_report {
  int64_t records_read;
  int64_t records_dropped; /* rows with missing values */
  int64_t train_size;
  int64_t test_size;
  int32_t encoded_width;  /* features plus both label columns */
  int32_t feature_width;
} obfx_preprocess_report;

/* Parses the raw Adult files (the first may carry no header; lines starting
 * with '|' are skipped), one-hot encodes, splits and writes train.csv,
 * test.csv and column_map.json into out_dir. */
OBFX_API obfx_status obfx_preprocess_adult(const char* const* raw_paths,
                                           size_t n_paths,
                                           double train_fraction,
                                           uint64_t seed, const char* out_dir,
                                           obfx_preprocess_report* report);

OBFX_API obfx_status obfx_dataset_load_csv(const char* path, obfx_dataset** out);
OBFX_API obfx_status obfx_dataset_save_csv(const obfx_dataset* ds, const char* path);
OBFX_API void obfx_dataset_free(obfx_dataset* ds);
OBFX_API int64_t obfx_dataset_size(const obfx_dataset* ds);
OBFX_API int32_t obfx_dataset_width(const obfx_dataset* ds);
OBFX_API obfx_status obfx_dataset_majority(const obfx_dataset* ds,
                                           obfx_target target, double* rate);
/* Row-major copy of the features of records [first, first + count). */
OBFX_API obfx_status obfx_dataset_rows(const obfx_dataset* ds, int64_t first,
                                       int64_t count, double* out);
/* Seeded shuffle-and-cut; `fraction` of the records go to `first`. */
OBFX_API obfx_status obfx_dataset_split(const obfx_dataset* ds, double fraction,
                                        uint64_t seed, obfx_dataset** first,
                                        obfx_dataset** second);

/* Two tied binary groups (one per label) agreeing with their label with
 * probability (1 + correlation) / 2, plus independent filler columns. */
OBFX_API obfx_status obfx_synth_generate(int64_t n, double correlation,
                                         uint64_t seed, obfx_dataset** out);

/* ---- obfuscator ----------------------------------------------------------- */

typedef struct obfx_train_options {
  double learning_rate;
  int32_t epochs;
  int32_t batch_size;
  int32_t patience;
  double validation_fraction;
  uint64_t seed;
} obfx_train_options;

typedef struct obfx_train_report {
  int32_t epochs_run;
  int32_t best_epoch;
  int32_t early_stopped;
  double initial_val_ae;
  double best_val_ae;
  double val_accuracy;
} obfx_train_report;

OBFX_API void obfx_train_options_default(obfx_train_options* opts);

/* Trains the categorical obfuscator on `train`, holding out
 * validation_fraction for early stopping. history_path may be NULL. */
OBFX_API obfx_status obfx_train(const obfx_dataset* train,
                                const obfx_train_options* opts,
                                const char* history_path, obfx_model** out,
                                obfx_train_report* report);

OBFX_API obfx_status obfx_model_save(const obfx_model* model, const char* path);
OBFX_API obfx_status obfx_model_load(const char* path, obfx_model** out);
OBFX_API void obfx_model_free(obfx_model* model);
OBFX_API int32_t obfx_model_input_dim(const obfx_model* model);
OBFX_API int64_t obfx_model_param_count(const obfx_model* model);
OBFX_API obfx_status obfx_model_reconstruct(const obfx_model* model,
                                            const obfx_dataset* ds,
                                            obfx_dataset** out);

typedef struct obfx_param_counts {
  int64_t encoder;
  int64_t classifier;
  int64_t rest;
  int64_t decoder;
  int64_t total;
  int64_t reported; /* reference count for comparison */
} obfx_param_counts;

OBFX_API obfx_status obfx_obfuscator_params(int32_t input_dim,
                                            obfx_param_counts* out);

/* ---- privatization -------------------------------------------------------- */

typedef struct obfx_privacy {
  double noise_multiplier; /* variance = noise_multiplier * nu */
  double lambda;
  int32_t g_enabled;
  int32_t f_enabled;
  uint64_t noise_seed;
} obfx_privacy;

OBFX_API void obfx_privacy_default(obfx_privacy* p);
OBFX_API obfx_status obfx_obfuscate(const obfx_model* model,
                                    const obfx_dataset* ds,
                                    const obfx_privacy* privacy,
                                    obfx_dataset** out);

/* ---- evaluation ----------------------------------------------------------- */

typedef struct obfx_probe_options {
  double learning_rate;
  int32_t epochs;
  int32_t batch_size;
  int32_t patience;
  double validation_fraction;
  uint64_t seed;
} obfx_probe_options;

typedef struct obfx_result {
  obfx_protocol protocol;
  double accuracy;
  double baseline; /* majority-class rate of the scored labels */
  uint64_t probe_seed;
  int64_t probe_train_records;
  int32_t probe_epochs;
  obfx_eval_mode eval_mode;
} obfx_result;

OBFX_API void obfx_probe_options_default(obfx_probe_options* opts);

/* Runs one measurement protocol.
 *   weak:     probe on `aux`, scored on obfuscate(test).
 *   strong:   probe on obfuscate(aux) with its own noise draw, scored on
 *             obfuscate(test).
 *   utility:  probe on obfuscate(provider), scored per eval_mode.
 *   baseline: probe on `provider` for `target`, scored on `test`; the model
 *             and privacy settings are ignored and may be NULL. */
OBFX_API obfx_status obfx_evaluate(obfx_protocol protocol,
                                   const obfx_model* model,
                                   const obfx_privacy* privacy,
                                   const obfx_dataset* provider,
                                   const obfx_dataset* aux,
                                   const obfx_dataset* test, obfx_target target,
                                   obfx_eval_mode eval_mode,
                                   const obfx_probe_options* probe,
                                   obfx_result* out);

typedef struct obfx_decorrelation {
  double agreement;
  int64_t injected[2];
  int64_t counts[2][2];      /* [injected][predicted] */
  int64_t histogram[2][10];  /* P(class 1) in ten bins, per injected class */
  double utility_accuracy;   /* utility probe on the unmodified test set */
} obfx_decorrelation;

/* Trains a utility probe on obfuscate(provider) with k = 0 and the clamp at
 * `lambda`, then injects random one-hot classifier outputs into `test`. */
OBFX_API obfx_status obfx_decorrelation_test(const obfx_model* model,
                                             const obfx_dataset* provider,
                                             const obfx_dataset* test,
                                             double lambda,
                                             const obfx_probe_options* probe,
                                             uint64_t seed,
                                             obfx_decorrelation* out);

/* ---- tradeoff ------------------------------------------------------------- */

typedef struct obfx_sweep_options {
  const double* k_grid;
  size_t k_count;
  const double* lambda_grid;
  size_t lambda_count;
  obfx_adversary adversary;
  obfx_eval_mode eval_mode;
  obfx_probe_options probe;
  uint64_t seed;
  int32_t include_reference;
  const char* manifest_path; /* may be NULL */
  int32_t jobs;
} obfx_sweep_options;

typedef struct obfx_point {
  double k;
  double lambda;
  double leakage;
  double utility;
  int32_t g_enabled;
  uint64_t seed;
  int32_t gaussian_input; /* 1 for baseline points */
} obfx_point;

OBFX_API obfx_status obfx_sweep(const obfx_model* model,
                                const obfx_dataset* provider,
                                const obfx_dataset* aux,
                                const obfx_dataset* test,
                                const obfx_sweep_options* opts,
                                obfx_curve** out);
/* Input-noise comparison curve; variances are taken from opts->k_grid. */
OBFX_API obfx_status obfx_gaussian_baseline(const obfx_dataset* provider,
                                            const obfx_dataset* aux,
                                            const obfx_dataset* test,
                                            const obfx_sweep_options* opts,
                                            obfx_curve** out);

OBFX_API obfx_status obfx_curve_load_csv(const char* path, obfx_curve** out);
OBFX_API obfx_status obfx_curve_save_csv(const obfx_curve* curve, const char* path);
OBFX_API obfx_status obfx_curve_save_hull(const obfx_curve* curve,
                                          obfx_origin origin, const char* path);
OBFX_API void obfx_curve_free(obfx_curve* curve);
OBFX_API size_t obfx_curve_size(const obfx_curve* curve);
OBFX_API obfx_status obfx_curve_point(const obfx_curve* curve, size_t i,
                                      obfx_point* out);
OBFX_API obfx_status obfx_curve_auc(const obfx_curve* curve, obfx_origin origin,
                                    double* out);

#ifdef __cplusplus
}
#endif

#endif /* OBFX_OBFX_H_ */
