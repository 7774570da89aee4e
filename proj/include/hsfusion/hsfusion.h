/*
 * Copyright 2026 The hsfusion Authors
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
 * C interface of libhsfusion: hybrid score- and rank-level fusion of two
 * identification models, k-fold evaluation, a calibrated score simulator
 * and ECG preprocessing.
 *
 * Conventions:
 *  - Every fallible call returns hsf_status; HSF_OK is 0. On failure,
 *    hsf_last_error() describes the most recent error on the calling thread.
 *  - Objects are opaque handles created by the library and released with the
 *    matching *_free function (which accepts NULL).
 *  - Handles are immutable after creation and may be shared across threads.
 */

#ifndef HSFUSION_H_
#define HSFUSION_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HSF_BUILDING_LIBRARY)
#    define HSF_API __declspec(dllexport)
#  else
#    define HSF_API __declspec(dllimport)
#  endif
#else
#  define HSF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hsf_status {
  HSF_OK = 0,
  HSF_ERR_INVALID_ARGUMENT = 1,
  HSF_ERR_VALIDATION = 2,
  HSF_ERR_RUNTIME = 3,
  HSF_ERR_IO = 4
} hsf_status;

typedef struct hsf_dataset hsf_dataset;
typedef struct hsf_report hsf_report;
typedef struct hsf_model hsf_model;

HSF_API const char* hsf_version(void);

/* Message of the last failed call on this thread ("" if none). */
HSF_API const char* hsf_last_error(void);

/* Receives non-fatal diagnostics. NULL restores the default (discard). */
typedef void (*hsf_warning_fn)(const char* message, void* user_data);
HSF_API void hsf_set_warning_handler(hsf_warning_fn fn, void* user_data);

/* ---- Simulator ------------------------------------------------------ */

enum { HSF_SCENARIO_CLEAN = 0, HSF_SCENARIO_AWGN = 1 };

typedef struct hsf_modality_params {
  double true_class_mean;
  double sigma_clean;
  double sigma_degraded;
} hsf_modality_params;

typedef struct hsf_sim_params {
  uint32_t num_classes;
  uint32_t samples_per_class;
  int scenario; /* HSF_SCENARIO_* */
  hsf_modality_params face;
  hsf_modality_params ecg;
} hsf_sim_params;

/* Target rank-1 accuracies. The *_mixed targets are whole-population
 * accuracies under the AWGN scenario. */
typedef struct hsf_calibration_targets {
  double face_clean;
  double ecg_clean;
  double face_mixed;
  double ecg_mixed;
} hsf_calibration_targets;

typedef struct hsf_calibration_result {
  double face_clean_achieved;
  double ecg_clean_achieved;
  double face_mixed_achieved; /* 0 for the clean scenario */
  double ecg_mixed_achieved;
  int face_refit_clean; /* nonzero: clean sigma was refit in the scenario */
  int ecg_refit_clean;
} hsf_calibration_result;

/* "desk" (20 x 20) or "full" (87 x 100); clean scenario, sigmas unset (0). */
HSF_API hsf_status hsf_sim_params_preset(const char* name, hsf_sim_params* out);

/* 98.8 / 96.1 % clean, 66.6 / 76.3 % mixed. */
HSF_API void hsf_calibration_targets_default(hsf_calibration_targets* out);

/* Fills the sigmas of `params` for its scenario: clean sigmas first, then
 * (AWGN only) the degraded sigmas from the mixed targets. */
HSF_API hsf_status hsf_sim_calibrate(hsf_sim_params* params,
                                     const hsf_calibration_targets* targets,
                                     uint32_t trials, uint64_t seed,
                                     hsf_calibration_result* result);

HSF_API hsf_status hsf_dataset_simulate(const hsf_sim_params* params,
                                        uint64_t seed, hsf_dataset** out);

/* ---- Datasets ------------------------------------------------------- */

/* Loads face and ECG score CSVs. normalize != 0 applies per-row min-max. */
HSF_API hsf_status hsf_dataset_load(const char* face_path, const char* ecg_path,
                                    int normalize, hsf_dataset** out);
HSF_API hsf_status hsf_dataset_export(const hsf_dataset* data,
                                      const char* face_path,
                                      const char* ecg_path);
HSF_API size_t hsf_dataset_num_samples(const hsf_dataset* data);
HSF_API size_t hsf_dataset_num_classes(const hsf_dataset* data);
HSF_API void hsf_dataset_free(hsf_dataset* data);

/* ---- Experiments ---------------------------------------------------- */

typedef struct hsf_experiment_config {
  uint32_t folds;      /* default 10 */
  uint64_t seed;       /* default 0 */
  double bound;        /* default 0.20 */
  uint32_t rank_depth; /* default 5 */
  uint32_t threads;    /* default 1; does not affect results */
  const char* scenario; /* echoed label; NULL means "none" */
} hsf_experiment_config;

typedef struct hsf_fold_result {
  uint32_t fold_id;
  uint32_t test_count;
  uint32_t error_count_fused;
  double acc_face;
  double acc_ecg;
  double acc_fused;
  double acc_weighted_sum;
} hsf_fold_result;

typedef struct hsf_report_summary {
  double face_mean, face_std;
  double ecg_mean, ecg_std;
  double fused_mean, fused_std;
  double weighted_sum_mean, weighted_sum_std;
} hsf_report_summary;

enum { HSF_REPORT_TEXT = 0, HSF_REPORT_JSON = 1 };

HSF_API void hsf_experiment_config_init(hsf_experiment_config* cfg);
HSF_API hsf_status hsf_run_experiment(const hsf_dataset* data,
                                      const hsf_experiment_config* cfg,
                                      hsf_report** out);
HSF_API size_t hsf_report_num_folds(const hsf_report* report);
HSF_API hsf_status hsf_report_fold(const hsf_report* report, size_t index,
                                   hsf_fold_result* out);
HSF_API hsf_status hsf_report_summary_get(const hsf_report* report,
                                          hsf_report_summary* out);
HSF_API hsf_status hsf_report_write(const hsf_report* report, const char* path,
                                    int format);
/* Renders into `buf` (NUL-terminated). `*needed` receives the size including
 * the terminator; call with buf = NULL to query it. Returns
 * HSF_ERR_INVALID_ARGUMENT if `capacity` is too small. */
HSF_API hsf_status hsf_report_render(const hsf_report* report, int format,
                                     char* buf, size_t capacity, size_t* needed);
/* Reads a JSON report written by hsf_report_write. */
HSF_API hsf_status hsf_report_read(const char* path, hsf_report** out);
HSF_API int hsf_report_equal(const hsf_report* a, const hsf_report* b);
HSF_API void hsf_report_free(hsf_report* report);

/* ---- Fusion models -------------------------------------------------- */

/* Fits D on every sample of the dataset. */
HSF_API hsf_status hsf_model_fit(const hsf_dataset* data, uint32_t rank_depth,
                                 double bound, hsf_model** out);
HSF_API hsf_status hsf_model_save(const hsf_model* model, const char* path);
HSF_API hsf_status hsf_model_load(const char* path, hsf_model** out);
HSF_API size_t hsf_model_num_classes(const hsf_model* model);
/* External label of class `index`, or NULL if the model stores none. */
HSF_API const char* hsf_model_class_label(const hsf_model* model, size_t index);
/* Fused prediction for one sample. `final_scores` (nullable) receives the M
 * entries of F. normalize != 0 min-max normalizes both inputs first. */
HSF_API hsf_status hsf_model_predict(const hsf_model* model,
                                     const double* face, const double* ecg,
                                     size_t num_classes, int normalize,
                                     size_t* predicted, double* final_scores);
HSF_API void hsf_model_free(hsf_model* model);

/* ---- ECG preprocessing ---------------------------------------------- */

typedef struct hsf_ecg_options {
  double sample_rate;           /* Hz; <= 0 means infer (files) or 512 */
  double duration_seconds;      /* default 4.0 */
  double threshold_fraction;    /* default 0.8 */
  double search_window_seconds; /* default 1.5 */
} hsf_ecg_options;

HSF_API void hsf_ecg_options_init(hsf_ecg_options* opts);

/* Preprocesses `n` samples into `out` (capacity `capacity`); `*out_len`
 * receives the gated length. */
HSF_API hsf_status hsf_ecg_preprocess(const double* samples, size_t n,
                                      const hsf_ecg_options* opts, double* out,
                                      size_t capacity, size_t* out_len);

/* Reads a signal file (one value per line, or time,value CSV), preprocesses
 * it and writes the result in the same format. */
HSF_API hsf_status hsf_ecg_preprocess_file(const char* in_path,
                                           const char* out_path,
                                           const hsf_ecg_options* opts,
                                           size_t* out_len);

#ifdef __cplusplus
}
#endif

#endif /* HSFUSION_H_ */
