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
#include <span>
#include <vector>

#include "hsfusion/core.hpp"

namespace hsf {

/// Per-subject reliability of one model over a training set.
using SubjectScoreVector = std::vector<double>;

struct ScoringConfig {
  /// How many ranked predictions are searched for the true class.
  std::size_t rank_depth = 5;
  /// Floor applied to a punished entry right after it is decremented.
  double clamp_floor = 0.0;
  /// Final divisor, N/M of the training set.
  double samples_per_class = 1.0;
};

/// Gap between the top confidence and the confidence at the true class's
/// rank: 0 at rank 1, max_1 - max_r for ranks 2..rank_depth, and 1.0 when the
/// true class is not in the top rank_depth. `c` must already lie in [0, 1].
double conf_diff(std::span<const double> c, ClassIndex true_label,
                 std::size_t rank_depth);

/// Subject accuracy scores over every row of `confidences`.
///
/// Samples are consumed in order: each awards (1 - confDiff) to its true
/// class, then subtracts confDiff from the rank-1 class and floors that one
/// entry at `clamp_floor`. The floor is applied per sample, so reordering the
/// input can change the result. Finally every entry is divided by
/// `samples_per_class`. Unequal per-class counts add a warning.
SubjectScoreVector compute_subject_scores(const ConfidenceMatrix& confidences,
                                          std::span<const ClassIndex> labels,
                                          const ScoringConfig& cfg,
                                          Warnings* warnings = nullptr);

/// Same as above restricted to `rows` (e.g. a fold's training portion), in
/// the order given.
SubjectScoreVector compute_subject_scores(const ConfidenceMatrix& confidences,
                                          std::span<const ClassIndex> labels,
                                          std::span<const std::size_t> rows,
                                          const ScoringConfig& cfg,
                                          Warnings* warnings = nullptr);

}  // namespace hsf
