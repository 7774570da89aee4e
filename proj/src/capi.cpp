// Copyright 2026 The hsfusion Authors
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

#include "hsfusion/hsfusion.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <new>
#include <optional>
#include <string>

#include "hsfusion/ecg_prep.hpp"
#include "hsfusion/evaluation.hpp"
#include "hsfusion/fusion.hpp"
#include "hsfusion/io.hpp"
#include "hsfusion/simulator.hpp"

struct hsf_dataset {
  hsf::Dataset data;
};

struct hsf_report {
  hsf::ExperimentReport report;
};

struct hsf_model {
  hsf::StoredModel stored;
};

namespace {

thread_local std::string g_last_error;

std::mutex g_warning_mutex;
hsf_warning_fn g_warning_fn = nullptr;
void* g_warning_user = nullptr;

void emit(const hsf::Warnings& warnings) {
  std::lock_guard lock(g_warning_mutex);
  if (!g_warning_fn) return;
  for (const auto& m : warnings.messages()) g_warning_fn(m.c_str(), g_warning_user);
}

hsf_status status_of(hsf::ErrorKind kind) {
  switch (kind) {
    case hsf::ErrorKind::InvalidArgument:
      return HSF_ERR_INVALID_ARGUMENT;
    case hsf::ErrorKind::Validation:
      return HSF_ERR_VALIDATION;
    case hsf::ErrorKind::Runtime:
      return HSF_ERR_RUNTIME;
    case hsf::ErrorKind::Io:
      return HSF_ERR_IO;
  }
  return HSF_ERR_RUNTIME;
}

// Runs `body`, translating exceptions into a status plus hsf_last_error().
template <typename F>
hsf_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return HSF_OK;
  } catch (const hsf::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HSF_ERR_RUNTIME;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HSF_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return HSF_ERR_RUNTIME;
  }
}

void require(const void* p, const char* what) {
  if (!p) hsf::raise(hsf::ErrorKind::InvalidArgument, std::string(what) + " is NULL");
}

hsf::GeneratorParams generator_params(const hsf_sim_params& p,
                                      const hsf_modality_params& m) {
  hsf::GeneratorParams g;
  g.num_classes = p.num_classes;
  g.samples_per_class = p.samples_per_class;
  g.true_class_mean = m.true_class_mean;
  g.noise_sigma_clean = m.sigma_clean;
  g.noise_sigma_degraded = m.sigma_degraded;
  // The clean scenario never draws degraded samples.
  if (p.scenario == HSF_SCENARIO_CLEAN && !(g.noise_sigma_degraded > g.noise_sigma_clean)) {
    g.noise_sigma_degraded = hsf::kSigmaSearchMax;
  }
  return g;
}

hsf::DegradationScenario scenario_of(int scenario) {
  switch (scenario) {
    case HSF_SCENARIO_CLEAN:
      return hsf::DegradationScenario::clean();
    case HSF_SCENARIO_AWGN:
      return hsf::DegradationScenario::awgn();
  }
  hsf::raise(hsf::ErrorKind::InvalidArgument, "unknown scenario code");
}

hsf::ReportFormat format_of(int format) {
  if (format == HSF_REPORT_TEXT) return hsf::ReportFormat::Text;
  if (format == HSF_REPORT_JSON) return hsf::ReportFormat::Json;
  hsf::raise(hsf::ErrorKind::InvalidArgument, "unknown report format");
}

hsf::PreprocessOptions preprocess_options(const hsf_ecg_options& o) {
  hsf::PreprocessOptions p;
  p.duration_seconds = o.duration_seconds;
  p.detector.threshold_fraction = o.threshold_fraction;
  p.detector.search_window_seconds = o.search_window_seconds;
  return p;
}

}  // namespace

extern "C" {

const char* hsf_version(void) { return "0.1.0"; }

const char* hsf_last_error(void) { return g_last_error.c_str(); }

void hsf_set_warning_handler(hsf_warning_fn fn, void* user_data) {
  std::lock_guard lock(g_warning_mutex);
  g_warning_fn = fn;
  g_warning_user = user_data;
}

hsf_status hsf_sim_params_preset(const char* name, hsf_sim_params* out) {
  return guarded([&] {
    require(name, "preset name");
    require(out, "output");
    const hsf::GeneratorParams g = hsf::preset(name);
    *out = hsf_sim_params{};
    out->num_classes = static_cast<uint32_t>(g.num_classes);
    out->samples_per_class = static_cast<uint32_t>(g.samples_per_class);
    out->scenario = HSF_SCENARIO_CLEAN;
    out->face.true_class_mean = g.true_class_mean;
    out->ecg.true_class_mean = g.true_class_mean;
  });
}

void hsf_calibration_targets_default(hsf_calibration_targets* out) {
  if (!out) return;
  out->face_clean = 0.988;
  out->ecg_clean = 0.961;
  out->face_mixed = 0.666;
  out->ecg_mixed = 0.763;
}

hsf_status hsf_sim_calibrate(hsf_sim_params* params,
                             const hsf_calibration_targets* targets,
                             uint32_t trials, uint64_t seed,
                             hsf_calibration_result* result) {
  return guarded([&] {
    require(params, "params");
    require(targets, "targets");
    const auto scenario = scenario_of(params->scenario);
    hsf_calibration_result res{};

    auto fit = [&](hsf_modality_params& m, double clean_target,
                   double mixed_target,
                   const std::function<bool(std::size_t)>& rule,
                   double& clean_achieved, double& mixed_achieved,
                   int& refit) {
      hsf::GeneratorParams tmpl;
      tmpl.num_classes = params->num_classes;
      tmpl.samples_per_class = params->samples_per_class;
      tmpl.true_class_mean = m.true_class_mean;
      auto clean = hsf::calibrate(clean_target, tmpl, trials, seed);
      clean_achieved = clean.achieved_accuracy;
      hsf::GeneratorParams fitted = clean.params;
      if (params->scenario == HSF_SCENARIO_AWGN) {
        const double share = hsf::degraded_fraction(rule, params->num_classes);
        const auto mixed =
            hsf::calibrate_degraded(mixed_target, fitted, share, trials, seed);
        fitted = mixed.params;
        mixed_achieved = mixed.achieved_accuracy;
        refit = mixed.refit_clean ? 1 : 0;
      }
      m.sigma_clean = fitted.noise_sigma_clean;
      m.sigma_degraded = fitted.noise_sigma_degraded;
    };

    hsf_modality_params face = params->face, ecg = params->ecg;
    fit(face, targets->face_clean, targets->face_mixed, scenario.face_degraded,
        res.face_clean_achieved, res.face_mixed_achieved, res.face_refit_clean);
    fit(ecg, targets->ecg_clean, targets->ecg_mixed, scenario.ecg_degraded,
        res.ecg_clean_achieved, res.ecg_mixed_achieved, res.ecg_refit_clean);
    params->face = face;
    params->ecg = ecg;
    if (result) *result = res;
  });
}

hsf_status hsf_dataset_simulate(const hsf_sim_params* params, uint64_t seed,
                                hsf_dataset** out) {
  return guarded([&] {
    require(params, "params");
    require(out, "output");
    *out = nullptr;
    auto ds = std::make_unique<hsf_dataset>();
    ds->data = hsf::generate_dataset(generator_params(*params, params->face),
                                     generator_params(*params, params->ecg),
                                     scenario_of(params->scenario), seed);
    *out = ds.release();
  });
}

hsf_status hsf_dataset_load(const char* face_path, const char* ecg_path,
                            int normalize, hsf_dataset** out) {
  return guarded([&] {
    require(face_path, "face path");
    require(ecg_path, "ecg path");
    require(out, "output");
    *out = nullptr;
    hsf::Warnings warnings;
    auto ds = std::make_unique<hsf_dataset>();
    ds->data = hsf::load_dataset(face_path, ecg_path, normalize != 0, &warnings);
    emit(warnings);
    *out = ds.release();
  });
}

hsf_status hsf_dataset_export(const hsf_dataset* data, const char* face_path,
                              const char* ecg_path) {
  return guarded([&] {
    require(data, "dataset");
    require(face_path, "face path");
    require(ecg_path, "ecg path");
    hsf::export_dataset(data->data, face_path, ecg_path);
  });
}

size_t hsf_dataset_num_samples(const hsf_dataset* data) {
  return data ? data->data.num_samples() : 0;
}

size_t hsf_dataset_num_classes(const hsf_dataset* data) {
  return data ? data->data.num_classes() : 0;
}

void hsf_dataset_free(hsf_dataset* data) { delete data; }

void hsf_experiment_config_init(hsf_experiment_config* cfg) {
  if (!cfg) return;
  const hsf::EvaluationConfig d;
  cfg->folds = static_cast<uint32_t>(d.folds);
  cfg->seed = d.seed;
  cfg->bound = d.bound;
  cfg->rank_depth = static_cast<uint32_t>(d.rank_depth);
  cfg->threads = static_cast<uint32_t>(d.threads);
  cfg->scenario = nullptr;
}

hsf_status hsf_run_experiment(const hsf_dataset* data,
                              const hsf_experiment_config* cfg,
                              hsf_report** out) {
  return guarded([&] {
    require(data, "dataset");
    require(cfg, "config");
    require(out, "output");
    *out = nullptr;
    hsf::EvaluationConfig ec;
    ec.folds = cfg->folds;
    ec.seed = cfg->seed;
    ec.bound = cfg->bound;
    ec.rank_depth = cfg->rank_depth;
    ec.threads = cfg->threads;
    ec.scenario = cfg->scenario ? cfg->scenario : "none";
    hsf::Warnings warnings;
    auto rep = std::make_unique<hsf_report>();
    rep->report = hsf::run_experiment(data->data, ec, &warnings);
    emit(warnings);
    *out = rep.release();
  });
}

size_t hsf_report_num_folds(const hsf_report* report) {
  return report ? report->report.per_fold.size() : 0;
}

hsf_status hsf_report_fold(const hsf_report* report, size_t index,
                           hsf_fold_result* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "output");
    if (index >= report->report.per_fold.size()) {
      hsf::raise(hsf::ErrorKind::InvalidArgument, "fold index out of range");
    }
    const auto& r = report->report.per_fold[index];
    out->fold_id = static_cast<uint32_t>(r.fold_id);
    out->test_count = static_cast<uint32_t>(r.test_count);
    out->error_count_fused = static_cast<uint32_t>(r.error_count_fused);
    out->acc_face = r.acc_face;
    out->acc_ecg = r.acc_ecg;
    out->acc_fused = r.acc_fused;
    out->acc_weighted_sum = r.acc_weighted_sum;
  });
}

hsf_status hsf_report_summary_get(const hsf_report* report,
                                  hsf_report_summary* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "output");
    const auto& r = report->report;
    *out = {r.face.mean,  r.face.std,  r.ecg.mean,          r.ecg.std,
            r.fused.mean, r.fused.std, r.weighted_sum.mean, r.weighted_sum.std};
  });
}

hsf_status hsf_report_write(const hsf_report* report, const char* path,
                            int format) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    hsf::write_report(report->report, path, format_of(format));
  });
}

hsf_status hsf_report_render(const hsf_report* report, int format, char* buf,
                             size_t capacity, size_t* needed) {
  return guarded([&] {
    require(report, "report");
    const std::string text = format_of(format) == hsf::ReportFormat::Json
                                 ? hsf::render_report_json(report->report)
                                 : hsf::render_report_text(report->report);
    if (needed) *needed = text.size() + 1;
    if (!buf) return;
    if (capacity < text.size() + 1) {
      hsf::raise(hsf::ErrorKind::InvalidArgument, "render buffer too small");
    }
    std::memcpy(buf, text.c_str(), text.size() + 1);
  });
}

hsf_status hsf_report_read(const char* path, hsf_report** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output");
    *out = nullptr;
    auto rep = std::make_unique<hsf_report>();
    rep->report = hsf::read_report(path);
    *out = rep.release();
  });
}

int hsf_report_equal(const hsf_report* a, const hsf_report* b) {
  if (!a || !b) return a == b;
  return a->report == b->report ? 1 : 0;
}

void hsf_report_free(hsf_report* report) { delete report; }

hsf_status hsf_model_fit(const hsf_dataset* data, uint32_t rank_depth,
                         double bound, hsf_model** out) {
  return guarded([&] {
    require(data, "dataset");
    require(out, "output");
    *out = nullptr;
    data->data.validate();
    hsf::Warnings warnings;
    auto m = std::make_unique<hsf_model>();
    m->stored.model =
        hsf::fit_fusion_model(data->data, {}, rank_depth, bound, &warnings);
    m->stored.class_labels = data->data.class_labels;
    emit(warnings);
    *out = m.release();
  });
}

hsf_status hsf_model_save(const hsf_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    hsf::save_model(model->stored, path);
  });
}

hsf_status hsf_model_load(const char* path, hsf_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output");
    *out = nullptr;
    auto m = std::make_unique<hsf_model>();
    m->stored = hsf::load_model(path);
    *out = m.release();
  });
}

size_t hsf_model_num_classes(const hsf_model* model) {
  return model ? model->stored.model.difference.size() : 0;
}

const char* hsf_model_class_label(const hsf_model* model, size_t index) {
  if (!model || index >= model->stored.class_labels.size()) return nullptr;
  return model->stored.class_labels[index].c_str();
}

hsf_status hsf_model_predict(const hsf_model* model, const double* face,
                             const double* ecg, size_t num_classes,
                             int normalize, size_t* predicted,
                             double* final_scores) {
  return guarded([&] {
    require(model, "model");
    require(face, "face scores");
    require(ecg, "ecg scores");
    require(predicted, "output");
    const std::size_t m = model->stored.model.difference.size();
    if (num_classes != m) {
      hsf::raise(hsf::ErrorKind::Validation,
                 "score vectors have " + std::to_string(num_classes) +
                     " entries, model expects " + std::to_string(m));
    }
    std::vector<double> cf(face, face + m), ce(ecg, ecg + m);
    hsf::Warnings warnings;
    if (normalize) {
      cf = hsf::minmax_normalize(cf, &warnings);
      ce = hsf::minmax_normalize(ce, &warnings);
    } else {
      hsf::require_finite(cf, "face scores");
      hsf::require_finite(ce, "ecg scores");
    }
    const auto f = hsf::fused_final_score(cf, ce, model->stored.model);
    *predicted = hsf::argmax(f);
    if (final_scores) std::copy(f.begin(), f.end(), final_scores);
    emit(warnings);
  });
}

void hsf_model_free(hsf_model* model) { delete model; }

void hsf_ecg_options_init(hsf_ecg_options* opts) {
  if (!opts) return;
  const hsf::PreprocessOptions d;
  opts->sample_rate = 0.0;
  opts->duration_seconds = d.duration_seconds;
  opts->threshold_fraction = d.detector.threshold_fraction;
  opts->search_window_seconds = d.detector.search_window_seconds;
}

hsf_status hsf_ecg_preprocess(const double* samples, size_t n,
                              const hsf_ecg_options* opts, double* out,
                              size_t capacity, size_t* out_len) {
  return guarded([&] {
    require(samples, "samples");
    require(opts, "options");
    require(out_len, "output length");
    hsf::EcgSignal sig{{samples, samples + n},
                       opts->sample_rate > 0.0 ? opts->sample_rate
                                               : hsf::kDefaultSampleRate};
    const auto gated = hsf::preprocess(sig, preprocess_options(*opts));
    *out_len = gated.samples.size();
    if (!out) return;
    if (capacity < gated.samples.size()) {
      hsf::raise(hsf::ErrorKind::InvalidArgument, "output buffer too small");
    }
    std::copy(gated.samples.begin(), gated.samples.end(), out);
  });
}

hsf_status hsf_ecg_preprocess_file(const char* in_path, const char* out_path,
                                   const hsf_ecg_options* opts,
                                   size_t* out_len) {
  return guarded([&] {
    require(in_path, "input path");
    require(out_path, "output path");
    require(opts, "options");
    std::optional<double> rate;
    if (opts->sample_rate > 0.0) rate = opts->sample_rate;
    const auto file = hsf::read_signal(in_path, rate);
    const auto gated = hsf::preprocess(file.signal, preprocess_options(*opts));
    hsf::write_signal(out_path, gated, file.format);
    if (out_len) *out_len = gated.samples.size();
  });
}

}  // extern "C"
