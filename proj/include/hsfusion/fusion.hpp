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

#include <array>
#include <span>
#include <string>
#include <vector>

#include "hsfusion/core.hpp"
#include "hsfusion/subject_scoring.hpp"

namespace hsf {

inline constexpr double kDefaultDifferenceBound = 0.20;

/// Per-subject relative reliability of two models, rescaled into
/// [-bound, +bound]. Positive entries favour the second modality.
class DifferenceVector {
 public:
  DifferenceVector() = default;

  /// Rescales `raw` so its largest magnitude maps to `bound`. An all-zero
  /// input stays all zeros.
  static DifferenceVector normalize(std::span<const double> raw,
                                    double bound = kDefaultDifferenceBound);

  /// Adopts already-normalized values (e.g. a stored model). Throws
  /// Validation if any |value| exceeds `bound`.
  static DifferenceVector from_normalized(std::vector<double> values,
                                          double bound);

  std::span<const double> values() const noexcept { return values_; }
  double bound() const noexcept { return bound_; }
  std::size_t size() const noexcept { return values_.size(); }

  friend bool operator==(const DifferenceVector&,
                         const DifferenceVector&) = default;

 private:
  std::vector<double> values_;
  double bound_ = kDefaultDifferenceBound;
};

/// Which way the per-subject weight (0.5 +/- D) leans.
enum class WeightSign : int { Minus = -1, Plus = +1 };

/// Elementwise s_ecg - s_face.
std::vector<double> difference_vector(std::span<const double> s_ecg,
                                      std::span<const double> s_face);

DifferenceVector normalize_difference(std::span<const double> raw,
                                      double bound = kDefaultDifferenceBound);

/// c ⊙ (0.5 + sign * d), elementwise.
std::vector<double> fused_scores(std::span<const double> c,
                                 const DifferenceVector& d, WeightSign sign);

/// Elementwise sum of the two fused score vectors.
std::vector<double> final_score(std::span<const double> f_face,
                                std::span<const double> f_ecg);

/// Trained fusion state for one fold. `modality_order[0]` receives weights
/// (0.5 - D) and `modality_order[1]` receives (0.5 + D).
struct FusionModel {
  DifferenceVector difference;
  std::array<std::string, 2> modality_order{"face", "ecg"};

  /// D from the two models' subject scores (second minus first).
  static FusionModel fit(std::span<const double> s_face,
                         std::span<const double> s_ecg,
                         double bound = kDefaultDifferenceBound);

  void validate() const;

  friend bool operator==(const FusionModel&, const FusionModel&) = default;
};

/// Final score vector F for one sample; arguments follow the model's
/// modality order.
std::vector<double> fused_final_score(std::span<const double> c_face,
                                      std::span<const double> c_ecg,
                                      const FusionModel& model);

/// argmax of the final fused score, lowest index on ties.
ClassIndex predict_fused(std::span<const double> c_face,
                         std::span<const double> c_ecg,
                         const FusionModel& model);

/// Convex weights of the weighted-sum baseline.
struct BaselineWeights {
  double face = 0.5;
  double ecg = 0.5;
};

/// Weights proportional to each model's training accuracy.
BaselineWeights compute_baseline_weights(double train_acc_face,
                                         double train_acc_ecg);

ClassIndex predict_weighted_sum(std::span<const double> c_face,
                                std::span<const double> c_ecg,
                                const BaselineWeights& w);

}  // namespace hsf
