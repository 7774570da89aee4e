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

#include "hsfusion/subject_scoring.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace hsf {
namespace {

void check_normalized(std::span<const double> c) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    // Negated comparison also rejects NaN.
    if (!(c[i] >= 0.0 && c[i] <= 1.0)) {
      raise(ErrorKind::Validation,
            "confidence " + std::to_string(c[i]) + " at class " +
                std::to_string(i) + " is outside [0, 1]");
    }
  }
}

}  // namespace

double conf_diff(std::span<const double> c, ClassIndex true_label,
                 std::size_t rank_depth) {
  if (true_label >= c.size()) {
    raise(ErrorKind::InvalidArgument,
          "label " + std::to_string(true_label) + " outside [0, " +
              std::to_string(c.size()) + ")");
  }
  check_normalized(c);
  const RankedPrediction top = rank_top_n(c, rank_depth);
  const auto hit =
      std::find(top.indices.begin(), top.indices.end(), true_label);
  if (hit == top.indices.end()) return 1.0;
  const auto rank = static_cast<std::size_t>(hit - top.indices.begin());
  if (rank == 0) return 0.0;
  return std::clamp(top.values.front() - top.values[rank], 0.0, 1.0);
}

SubjectScoreVector compute_subject_scores(const ConfidenceMatrix& confidences,
                                          std::span<const ClassIndex> labels,
                                          const ScoringConfig& cfg,
                                          Warnings* warnings) {
  std::vector<std::size_t> rows(confidences.num_samples());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return compute_subject_scores(confidences, labels, rows, cfg, warnings);
}

SubjectScoreVector compute_subject_scores(const ConfidenceMatrix& confidences,
                                          std::span<const ClassIndex> labels,
                                          std::span<const std::size_t> rows,
                                          const ScoringConfig& cfg,
                                          Warnings* warnings) {
  const std::size_t m = confidences.num_classes();
  if (labels.size() != confidences.num_samples()) {
    raise(ErrorKind::Validation,
          "label count " + std::to_string(labels.size()) +
              " does not match sample count " +
              std::to_string(confidences.num_samples()));
  }
  if (rows.empty()) raise(ErrorKind::Validation, "empty training set");
  if (cfg.rank_depth < 1 || cfg.rank_depth > m) {
    raise(ErrorKind::InvalidArgument,
          "rank depth " + std::to_string(cfg.rank_depth) + " outside [1, " +
              std::to_string(m) + "]");
  }
  if (!(cfg.samples_per_class > 0.0)) {
    raise(ErrorKind::InvalidArgument, "samples_per_class must be positive");
  }

  std::vector<std::size_t> per_class(m, 0);
  SubjectScoreVector scores(m, 0.0);
  for (std::size_t r : rows) {
    if (r >= labels.size()) {
      raise(ErrorKind::InvalidArgument,
            "row " + std::to_string(r) + " out of range");
    }
    const ClassIndex truth = labels[r];
    if (truth >= m) {
      raise(ErrorKind::Validation, "label " + std::to_string(truth) +
                                       " outside [0, " + std::to_string(m) +
                                       ")");
    }
    ++per_class[truth];

    const auto c = confidences.row(r);
    const double diff = conf_diff(c, truth, cfg.rank_depth);
    const ClassIndex predicted = argmax(c);
    scores[truth] += 1.0 - diff;
    scores[predicted] -= diff;
    if (scores[predicted] < cfg.clamp_floor) {
      scores[predicted] = cfg.clamp_floor;
    }
  }

  if (warnings) {
    const auto [lo, hi] = std::minmax_element(per_class.begin(), per_class.end());
    if (*lo != *hi) {
      warnings->add("unbalanced training set (" + std::to_string(*lo) + " to " +
                    std::to_string(*hi) +
                    " samples per class); subject scores use an approximate "
                    "N/M normalizer");
    }
  }

  for (double& s : scores) s /= cfg.samples_per_class;
  return scores;
}

}  // namespace hsf
