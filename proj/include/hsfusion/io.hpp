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

// File formats.
//
// Score CSV (one file per modality):
//
//   #hsfusion-scores modality=face classes=3
//   sample_id,true_label,A,B,C
//   s1,B,0.1,0.9,0.0
//
// The column names after `true_label` are the class labels; `true_label`
// must be one of them and is remapped to its 0-based column position.
//
// ECG signals are either one value per line, or a two-column
// `time,value` CSV (an optional non-numeric header line is skipped).

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hsfusion/core.hpp"
#include "hsfusion/ecg_prep.hpp"
#include "hsfusion/evaluation.hpp"
#include "hsfusion/fusion.hpp"

namespace hsf {

struct ScoreFile {
  ConfidenceMatrix matrix;
  LabelVector labels;
  std::vector<std::string> class_labels;
};

/// Parses and validates a score CSV. With `normalize`, each row is min-max
/// normalized; without it every value must already lie in [0, 1].
/// Errors carry the offending line number.
ScoreFile load_score_matrix(const std::string& path, bool normalize = true,
                            Warnings* warnings = nullptr);

/// Writes values with round-trip precision.
void write_score_matrix(const std::string& path, const ConfidenceMatrix& matrix,
                        const LabelVector& labels,
                        const std::vector<std::string>& class_labels);

/// Loads both modalities and aligns the ECG rows to the face file's sample
/// order. Throws Validation when sample sets, labels or class lists differ.
Dataset load_dataset(const std::string& face_path, const std::string& ecg_path,
                     bool normalize = true, Warnings* warnings = nullptr);

void export_dataset(const Dataset& data, const std::string& face_path,
                    const std::string& ecg_path);

enum class ReportFormat { Text, Json };

/// Per-fold table plus an "avg ± std" row, accuracies in percent.
std::string render_report_text(const ExperimentReport& report);
std::string render_report_json(const ExperimentReport& report);

/// Inverse of render_report_json. The stored summary must match the one
/// recomputed from the folds.
ExperimentReport parse_report_json(const std::string& text);

void write_report(const ExperimentReport& report, const std::string& path,
                  ReportFormat format);
ExperimentReport read_report(const std::string& path);

/// Persisted fusion model: the normalized D vector, its bound, the modality
/// order, and optionally the external class labels.
struct StoredModel {
  FusionModel model;
  std::vector<std::string> class_labels;

  friend bool operator==(const StoredModel&, const StoredModel&) = default;
};

std::string render_model_json(const StoredModel& stored);
StoredModel parse_model_json(const std::string& text);
void save_model(const StoredModel& stored, const std::string& path);
StoredModel load_model(const std::string& path);

enum class SignalFormat { Lines, TimeValueCsv };

struct SignalFile {
  EcgSignal signal;
  SignalFormat format = SignalFormat::Lines;
};

/// Reads either signal format (detected from the first data line). For CSV
/// input without `sample_rate`, the rate is inferred from the time column;
/// line input without it defaults to 512 Hz.
SignalFile read_signal(const std::string& path,
                       std::optional<double> sample_rate = std::nullopt);

/// CSV output writes time starting at 0 s.
void write_signal(const std::string& path, const EcgSignal& signal,
                  SignalFormat format);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace hsf
