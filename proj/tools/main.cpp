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

// hsfusion command-line tool. Everything goes through the C API.
//
// Exit codes: 0 success, 1 usage, 2 data validation, 3 runtime / I/O.
// Every failure prints exactly one line starting with "hsfusion: error[".

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hsfusion/hsfusion.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

// Raised inside subcommand handlers; carries the exit code.
struct Failure {
  int code;
  std::string kind;
  std::string message;
};

int exit_code_of(hsf_status s) {
  switch (s) {
    case HSF_OK:
      return kExitOk;
    case HSF_ERR_INVALID_ARGUMENT:
      return kExitUsage;
    case HSF_ERR_VALIDATION:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

const char* kind_of(hsf_status s) {
  switch (s) {
    case HSF_ERR_INVALID_ARGUMENT:
      return "usage";
    case HSF_ERR_VALIDATION:
      return "validation";
    case HSF_ERR_IO:
      return "io";
    default:
      return "runtime";
  }
}

void check(hsf_status s) {
  if (s != HSF_OK) throw Failure{exit_code_of(s), kind_of(s), hsf_last_error()};
}

[[noreturn]] void usage_error(const std::string& message) {
  throw Failure{kExitUsage, "usage", message};
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

struct DatasetDeleter {
  void operator()(hsf_dataset* p) const { hsf_dataset_free(p); }
};
struct ReportDeleter {
  void operator()(hsf_report* p) const { hsf_report_free(p); }
};
struct ModelDeleter {
  void operator()(hsf_model* p) const { hsf_model_free(p); }
};
using DatasetPtr = std::unique_ptr<hsf_dataset, DatasetDeleter>;
using ReportPtr = std::unique_ptr<hsf_report, ReportDeleter>;
using ModelPtr = std::unique_ptr<hsf_model, ModelDeleter>;

struct ExperimentFlags {
  std::uint64_t seed = 0;
  std::uint32_t folds = 10;
  double bound = 0.2;
  std::uint32_t rank_depth = 5;
  std::uint32_t threads = 1;
};

struct OutputFlags {
  std::string out;
  std::string format = "auto";
  std::string model_out;
};

void add_experiment_flags(CLI::App* app, ExperimentFlags& f) {
  app->add_option("--seed", f.seed, "Master seed (folds, simulation)")
      ->capture_default_str();
  app->add_option("--folds", f.folds, "Cross-validation folds")
      ->capture_default_str()
      ->check(CLI::Range(2u, 1000000u));
  app->add_option("--bound", f.bound, "Bound of the normalized difference vector")
      ->capture_default_str();
  app->add_option("--rank-depth", f.rank_depth, "Ranks searched by subject scoring")
      ->capture_default_str();
  app->add_option("--threads", f.threads, "Worker threads (results are identical)")
      ->capture_default_str()
      ->check(CLI::Range(1u, 1024u));
}

void add_output_flags(CLI::App* app, OutputFlags& f) {
  app->add_option("--out", f.out, "Report path (default: stdout)");
  app->add_option("--format", f.format, "Report format")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "text", "json"}));
  app->add_option("--model-out", f.model_out,
                  "Also fit a fusion model on all samples and save it here");
}

void add_config_flag(CLI::App* app) {
  // Consumed before parsing; registered so it shows in --help.
  app->add_option("--config", "Flat key = value file; keys are flag names");
}

hsf_experiment_config experiment_config(const ExperimentFlags& f,
                                        const std::string& scenario) {
  hsf_experiment_config cfg;
  hsf_experiment_config_init(&cfg);
  cfg.seed = f.seed;
  cfg.folds = f.folds;
  cfg.bound = f.bound;
  cfg.rank_depth = f.rank_depth;
  cfg.threads = f.threads;
  cfg.scenario = scenario.c_str();
  return cfg;
}

int report_format(const OutputFlags& f) {
  if (f.format == "json") return HSF_REPORT_JSON;
  if (f.format == "text") return HSF_REPORT_TEXT;
  const auto& p = f.out;
  return p.size() >= 5 && p.compare(p.size() - 5, 5, ".json") == 0
             ? HSF_REPORT_JSON
             : HSF_REPORT_TEXT;
}

void emit_report(const hsf_report* report, const OutputFlags& f) {
  const int format = report_format(f);
  if (!f.out.empty()) {
    check(hsf_report_write(report, f.out.c_str(), format));
    return;
  }
  std::size_t needed = 0;
  check(hsf_report_render(report, format, nullptr, 0, &needed));
  std::string text(needed, '\0');
  check(hsf_report_render(report, format, text.data(), text.size(), &needed));
  text.resize(needed - 1);
  std::cout << text;
}

void maybe_save_model(const hsf_dataset* data, const ExperimentFlags& e,
                      const OutputFlags& f) {
  if (f.model_out.empty()) return;
  hsf_model* raw = nullptr;
  check(hsf_model_fit(data, e.rank_depth, e.bound, &raw));
  ModelPtr model(raw);
  check(hsf_model_save(model.get(), f.model_out.c_str()));
}

std::vector<double> parse_vector(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Failure{kExitValidation, "validation",
                    std::string("bad number '") + item + "' in " + what + " scores"};
    }
  }
  return out;
}

// ---- simulator parameters shared by simulate / calibrate ---------------

struct SimFlags {
  std::string preset = "desk";
  std::string scenario = "clean";
  std::uint32_t trials = 20000;
  std::uint64_t calibration_seed = 0;
  double true_class_mean = 4.0;
  double face_sigma_clean = 0.0;
  double face_sigma_degraded = 0.0;
  double ecg_sigma_clean = 0.0;
  double ecg_sigma_degraded = 0.0;
  hsf_calibration_targets targets{};
};

void add_sim_flags(CLI::App* app, SimFlags& f, bool with_sigmas) {
  hsf_calibration_targets_default(&f.targets);
  app->add_option("--preset", f.preset, "Dataset size: desk (20x20) or full (87x100)")
      ->capture_default_str()
      ->check(CLI::IsMember({"desk", "full"}));
  app->add_option("--scenario", f.scenario, "clean, or awgn (degraded subjects)")
      ->capture_default_str()
      ->check(CLI::IsMember({"clean", "awgn"}));
  app->add_option("--trials", f.trials, "Monte-Carlo trials per calibration")
      ->capture_default_str()
      ->check(CLI::Range(100u, 100000000u));
  app->add_option("--calibration-seed", f.calibration_seed, "Seed of the calibration draws")
      ->capture_default_str();
  app->add_option("--true-class-mean", f.true_class_mean, "Logit offset of the true class")
      ->capture_default_str();
  app->add_option("--face-target", f.targets.face_clean, "Clean face accuracy")
      ->capture_default_str();
  app->add_option("--ecg-target", f.targets.ecg_clean, "Clean ECG accuracy")
      ->capture_default_str();
  app->add_option("--face-mixed-target", f.targets.face_mixed,
                  "Face accuracy under the awgn scenario")
      ->capture_default_str();
  app->add_option("--ecg-mixed-target", f.targets.ecg_mixed,
                  "ECG accuracy under the awgn scenario")
      ->capture_default_str();
  if (with_sigmas) {
    app->add_option("--face-sigma-clean", f.face_sigma_clean, "Skip calibration: face clean sigma");
    app->add_option("--face-sigma-degraded", f.face_sigma_degraded, "Face degraded sigma");
    app->add_option("--ecg-sigma-clean", f.ecg_sigma_clean, "ECG clean sigma");
    app->add_option("--ecg-sigma-degraded", f.ecg_sigma_degraded, "ECG degraded sigma");
  }
}

hsf_sim_params base_params(const SimFlags& f) {
  hsf_sim_params p;
  check(hsf_sim_params_preset(f.preset.c_str(), &p));
  p.scenario = f.scenario == "awgn" ? HSF_SCENARIO_AWGN : HSF_SCENARIO_CLEAN;
  p.face.true_class_mean = f.true_class_mean;
  p.ecg.true_class_mean = f.true_class_mean;
  return p;
}

hsf_calibration_result calibrate_params(const SimFlags& f, hsf_sim_params& p) {
  hsf_calibration_result res{};
  check(hsf_sim_calibrate(&p, &f.targets, f.trials, f.calibration_seed, &res));
  return res;
}

// ---- subcommands --------------------------------------------------------

struct SimulateCmd {
  SimFlags sim;
  ExperimentFlags exp;
  OutputFlags output;
  std::string export_face, export_ecg;

  void run() {
    hsf_sim_params p = base_params(sim);
    const bool awgn = p.scenario == HSF_SCENARIO_AWGN;
    const bool all_given = sim.face_sigma_clean > 0 && sim.ecg_sigma_clean > 0 &&
                           (!awgn || (sim.face_sigma_degraded > 0 && sim.ecg_sigma_degraded > 0));
    if (!all_given) calibrate_params(sim, p);
    if (sim.face_sigma_clean > 0) p.face.sigma_clean = sim.face_sigma_clean;
    if (sim.face_sigma_degraded > 0) p.face.sigma_degraded = sim.face_sigma_degraded;
    if (sim.ecg_sigma_clean > 0) p.ecg.sigma_clean = sim.ecg_sigma_clean;
    if (sim.ecg_sigma_degraded > 0) p.ecg.sigma_degraded = sim.ecg_sigma_degraded;

    hsf_dataset* raw = nullptr;
    check(hsf_dataset_simulate(&p, exp.seed, &raw));
    DatasetPtr data(raw);
    if (export_face.empty() != export_ecg.empty()) {
      usage_error("--export-face and --export-ecg must be given together");
    }
    if (!export_face.empty()) {
      check(hsf_dataset_export(data.get(), export_face.c_str(), export_ecg.c_str()));
    }
    const auto cfg = experiment_config(exp, sim.scenario);
    hsf_report* rep = nullptr;
    check(hsf_run_experiment(data.get(), &cfg, &rep));
    ReportPtr report(rep);
    emit_report(report.get(), output);
    maybe_save_model(data.get(), exp, output);
  }
};

struct EvaluateCmd {
  std::string face, ecg;
  bool no_normalize = false;
  std::string scenario = "none";
  ExperimentFlags exp;
  OutputFlags output;

  void run() {
    hsf_dataset* raw = nullptr;
    check(hsf_dataset_load(face.c_str(), ecg.c_str(), no_normalize ? 0 : 1, &raw));
    DatasetPtr data(raw);
    const auto cfg = experiment_config(exp, scenario);
    hsf_report* rep = nullptr;
    check(hsf_run_experiment(data.get(), &cfg, &rep));
    ReportPtr report(rep);
    emit_report(report.get(), output);
    maybe_save_model(data.get(), exp, output);
  }
};

struct FuseCmd {
  std::string model_path, face, ecg;
  bool no_normalize = false;
  bool show_scores = false;

  void run() {
    const auto cf = parse_vector(face, "face");
    const auto ce = parse_vector(ecg, "ecg");
    if (cf.size() != ce.size()) {
      throw Failure{kExitValidation, "validation", "face and ecg vectors differ in length"};
    }
    hsf_model* raw = nullptr;
    check(hsf_model_load(model_path.c_str(), &raw));
    ModelPtr model(raw);
    std::size_t predicted = 0;
    std::vector<double> final_scores(cf.size());
    check(hsf_model_predict(model.get(), cf.data(), ce.data(), cf.size(),
                            no_normalize ? 0 : 1, &predicted, final_scores.data()));
    const char* label = hsf_model_class_label(model.get(), predicted);
    std::cout << "predicted " << (label ? label : std::to_string(predicted))
              << " index " << predicted << '\n';
    if (show_scores) {
      std::ostringstream os;
      os.precision(17);
      for (std::size_t i = 0; i < final_scores.size(); ++i) {
        os << (i ? "," : "") << final_scores[i];
      }
      std::cout << "scores " << os.str() << '\n';
    }
  }
};

struct PrepEcgCmd {
  std::vector<std::string> inputs, outputs;
  double rate = 0.0;
  double duration = 4.0;
  double threshold = 0.8;
  double window = 1.5;

  static std::string derived_output(const std::string& in) {
    const auto slash = in.find_last_of('/');
    const auto dot = in.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
      return in + ".prep";
    }
    return in.substr(0, dot) + ".prep" + in.substr(dot);
  }

  void run() {
    if (!outputs.empty() && outputs.size() != inputs.size()) {
      usage_error("give one --out per --in, or none");
    }
    hsf_ecg_options opts;
    hsf_ecg_options_init(&opts);
    opts.sample_rate = rate;
    opts.duration_seconds = duration;
    opts.threshold_fraction = threshold;
    opts.search_window_seconds = window;

    // Failed signals are reported and skipped; the first failure sets the
    // exit code.
    std::unique_ptr<Failure> first_failure;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const std::string out = outputs.empty() ? derived_output(inputs[i]) : outputs[i];
      std::size_t len = 0;
      const hsf_status s = hsf_ecg_preprocess_file(inputs[i].c_str(), out.c_str(), &opts, &len);
      if (s != HSF_OK) {
        Failure f{exit_code_of(s), kind_of(s), inputs[i] + ": " + hsf_last_error()};
        if (inputs.size() == 1) throw f;
        std::cerr << "hsfusion: skipped " << one_line(f.message) << '\n';
        if (!first_failure) first_failure = std::make_unique<Failure>(f);
        continue;
      }
      std::cout << inputs[i] << " -> " << out << " (" << len << " samples)\n";
    }
    if (first_failure) {
      throw Failure{first_failure->code, first_failure->kind,
                    "one or more signals failed; first: " + first_failure->message};
    }
  }
};

struct CalibrateCmd {
  SimFlags sim;
  std::string out;

  void run() {
    hsf_sim_params p = base_params(sim);
    const auto res = calibrate_params(sim, p);
    std::ostringstream note;
    note << std::fixed << std::setprecision(4);
    note << "# hsfusion calibration: face clean " << res.face_clean_achieved
         << ", ecg clean " << res.ecg_clean_achieved;
    if (p.scenario == HSF_SCENARIO_AWGN) {
      note << ", face mixed " << res.face_mixed_achieved << ", ecg mixed "
           << res.ecg_mixed_achieved;
      if (res.face_refit_clean) note << " (face clean sigma refit)";
      if (res.ecg_refit_clean) note << " (ecg clean sigma refit)";
    }
    std::ostringstream os;
    os.precision(17);
    os << note.str() << '\n';
    os << "preset = " << sim.preset << '\n'
       << "scenario = " << sim.scenario << '\n'
       << "true-class-mean = " << sim.true_class_mean << '\n'
       << "face-sigma-clean = " << p.face.sigma_clean << '\n'
       << "ecg-sigma-clean = " << p.ecg.sigma_clean << '\n';
    if (p.scenario == HSF_SCENARIO_AWGN) {
      os << "face-sigma-degraded = " << p.face.sigma_degraded << '\n'
         << "ecg-sigma-degraded = " << p.ecg.sigma_degraded << '\n';
    }
    if (out.empty()) {
      std::cout << os.str();
      return;
    }
    std::ofstream f(out);
    if (!f || !(f << os.str()) || !f.flush()) {
      throw Failure{kExitRuntime, "io", "cannot write '" + out + "'"};
    }
  }
};

// ---- config file --------------------------------------------------------

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kExitRuntime, "io", "cannot open config '" + path + "'"};
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      usage_error(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return out;
}

bool flag_present(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

// Appends "--key=value" for config entries whose flag is absent from argv.
void apply_config(CLI::App& app, std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return;
  CLI::App* sub = nullptr;
  for (CLI::App* s : app.get_subcommands([](CLI::App*) { return true; })) {
    for (const auto& a : args) {
      if (a == s->get_name()) {
        sub = s;
        break;
      }
    }
    if (sub) break;
  }
  if (!sub) return;

  for (const auto& [key, value] : read_config(path)) {
    const std::string flag = "--" + key;
    if (key == "config") usage_error("config files cannot include other config files");
    if (sub->get_option_no_throw(flag) == nullptr) {
      bool known_elsewhere = false;
      for (CLI::App* s : app.get_subcommands([](CLI::App*) { return true; })) {
        known_elsewhere = known_elsewhere || s->get_option_no_throw(flag) != nullptr;
      }
      if (!known_elsewhere) usage_error("unknown config key '" + key + "'");
      continue;
    }
    if (!flag_present(args, flag)) args.push_back(flag + "=" + value);
  }
}

}  // namespace

int main(int argc, char** argv) {
  hsf_set_warning_handler(
      [](const char* msg, void*) { std::cerr << "hsfusion: warning: " << msg << '\n'; },
      nullptr);

  CLI::App app{"Hybrid score- and rank-level fusion of face and ECG identification models"};
  app.require_subcommand(1);

  SimulateCmd simulate;
  auto* sim = app.add_subcommand("simulate", "Generate synthetic scores and run a k-fold experiment");
  add_sim_flags(sim, simulate.sim, true);
  add_experiment_flags(sim, simulate.exp);
  add_output_flags(sim, simulate.output);
  sim->add_option("--export-face", simulate.export_face, "Write the simulated face scores (CSV)");
  sim->add_option("--export-ecg", simulate.export_ecg, "Write the simulated ECG scores (CSV)");
  add_config_flag(sim);

  EvaluateCmd evaluate;
  auto* ev = app.add_subcommand("evaluate", "Run a k-fold experiment on score files");
  ev->add_option("--face", evaluate.face, "Face score CSV")->required();
  ev->add_option("--ecg", evaluate.ecg, "ECG score CSV")->required();
  ev->add_flag("--no-normalize", evaluate.no_normalize, "Scores are already in [0, 1]");
  ev->add_option("--scenario", evaluate.scenario, "Label echoed into the report")
      ->capture_default_str();
  add_experiment_flags(ev, evaluate.exp);
  add_output_flags(ev, evaluate.output);
  add_config_flag(ev);

  FuseCmd fuse;
  auto* fu = app.add_subcommand("fuse", "Fuse one pair of confidence vectors with a stored model");
  fu->add_option("--model", fuse.model_path, "Model JSON from --model-out")->required();
  fu->add_option("--face", fuse.face, "Comma-separated face confidences")->required();
  fu->add_option("--ecg", fuse.ecg, "Comma-separated ECG confidences")->required();
  fu->add_flag("--no-normalize", fuse.no_normalize, "Inputs are already in [0, 1]");
  fu->add_flag("--scores", fuse.show_scores, "Also print the final score vector");
  add_config_flag(fu);

  PrepEcgCmd prep;
  auto* pe = app.add_subcommand("prep-ecg", "Normalize, R-peak align and gate ECG signals");
  pe->add_option("--in", prep.inputs, "Signal file(s)")->required();
  pe->add_option("--out", prep.outputs, "Output file(s) (default: <name>.prep.<ext>)");
  pe->add_option("--rate", prep.rate, "Sample rate in Hz (default: inferred or 512)");
  pe->add_option("--duration", prep.duration, "Gate length in seconds")->capture_default_str();
  pe->add_option("--threshold", prep.threshold, "Peak threshold fraction")->capture_default_str();
  pe->add_option("--window", prep.window, "Peak search window in seconds")->capture_default_str();
  add_config_flag(pe);

  CalibrateCmd calibrate;
  auto* ca = app.add_subcommand("calibrate", "Fit simulator noise levels to target accuracies");
  add_sim_flags(ca, calibrate.sim, false);
  ca->add_option("--out", calibrate.out, "Config file to write (default: stdout)");
  add_config_flag(ca);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    apply_config(app, args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      std::cerr << "hsfusion: error[usage]: " << one_line(e.what()) << '\n'
                << "Run with --help for usage.\n";
      return kExitUsage;
    }

    if (sim->parsed()) simulate.run();
    else if (ev->parsed()) evaluate.run();
    else if (fu->parsed()) fuse.run();
    else if (pe->parsed()) prep.run();
    else if (ca->parsed()) calibrate.run();
  } catch (const Failure& f) {
    std::cerr << "hsfusion: error[" << f.kind << "]: " << one_line(f.message) << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "hsfusion: error[runtime]: " << one_line(e.what()) << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
