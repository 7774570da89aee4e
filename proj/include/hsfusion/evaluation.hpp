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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hsfusion/core.hpp"
#include "hsfusion/fusion.hpp"

namespace hsf {

/// Two aligned confidence matrices plus the shared ground truth.
struct Dataset {
  ConfidenceMatrix face;
  ConfidenceMatrix ecg;
  LabelVector labels;
  /// External name of each class index (e.g. subject ids "1".."87").
  std::vector<std::string> class_labels;

  std::size_t num_samples() const noexcept { return labels.size(); }
  std::size_t num_classes() const noexcept { return face.num_classes(); }

  /// Throws Validation unless both matrices share M, sample ids and order,
  /// and every label is in range.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Sample-to-fold mapping shared by both modalities.
struct FoldAssignment {
  std::vector<std::size_t> fold_of_sample;
  std::size_t k = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::vector<std::size_t> test_indices(std::size_t fold) const;

  friend bool operator==(const FoldAssignment&,
                         const FoldAssignment&) = default;
};

/// Stratified, seeded k-fold split. Each class is shuffled independently and
/// dealt round-robin, continuing where the previous class stopped, so
/// per-class and per-fold counts both differ by at most one.
FoldAssignment make_folds(std::span<const ClassIndex> labels, std::size_t k,
                          std::uint64_t seed);

struct EvaluationConfig {
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  double bound = kDefaultDifferenceBound;
  std::size_t rank_depth = 5;
  /// Worker threads for fold evaluation; results do not depend on it.
  std::size_t threads = 1;
  /// Free-form label echoed into reports.
  std::string scenario = "none";
};

struct FoldResult {
  std::size_t fold_id = 0;
  std::size_t test_count = 0;
  double acc_face = 0.0;
  double acc_ecg = 0.0;
  double acc_fused = 0.0;
  double acc_weighted_sum = 0.0;
  std::size_t error_count_fused = 0;

  friend bool operator==(const FoldResult&, const FoldResult&) = default;
};

struct SystemSummary {
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1) standard deviation

  friend bool operator==(const SystemSummary&,
                         const SystemSummary&) = default;
};

struct ExperimentReport {
  std::vector<FoldResult> per_fold;
  SystemSummary face;
  SystemSummary ecg;
  SystemSummary fused;
  SystemSummary weighted_sum;

  // Config echo.
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  double bound = kDefaultDifferenceBound;
  std::size_t rank_depth = 5;
  std::string scenario;

  /// Recomputes the four summaries from `per_fold`.
  void summarize();

  friend bool operator==(const ExperimentReport&,
                         const ExperimentReport&) = default;
};

/// Fraction of positions where prediction equals label.
double accuracy(std::span<const ClassIndex> predictions,
                std::span<const ClassIndex> labels);

/// Mean and sample standard deviation, summed in input order.
SystemSummary summarize(std::span<const double> values);

/// Fits subject scores and the fusion model on the fold's training part and
/// scores face, ECG, proposed fusion and the weighted sum on its test part.
FoldResult evaluate_fold(const Dataset& data, const FoldAssignment& assignment,
                         std::size_t fold_id, const EvaluationConfig& cfg,
                         Warnings* warnings = nullptr);

/// Fusion model trained on the given rows (all rows when `rows` is empty).
FusionModel fit_fusion_model(const Dataset& data,
                             std::span<const std::size_t> rows,
                             std::size_t rank_depth, double bound,
                             Warnings* warnings = nullptr);

/// Full k-fold experiment. Folds may run in parallel; results are assembled
/// in fold order.
ExperimentReport run_experiment(const Dataset& data,
                                const EvaluationConfig& cfg,
                                Warnings* warnings = nullptr);

}  // namespace hsf
