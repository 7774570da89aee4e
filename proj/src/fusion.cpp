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

#include "hsfusion/fusion.hpp"

#include <cmath>
#include <string>

namespace hsf {
namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    raise(ErrorKind::InvalidArgument, std::string(what) + ": length " +
                                          std::to_string(a) + " vs " +
                                          std::to_string(b));
  }
}

void require_bound(double bound) {
  if (!(bound > 0.0) || !std::isfinite(bound)) {
    raise(ErrorKind::InvalidArgument, "difference bound must be positive");
  }
}

}  // namespace

DifferenceVector DifferenceVector::normalize(std::span<const double> raw,
                                             double bound) {
  require_bound(bound);
  require_finite(raw, "difference vector");
  double max_abs = 0.0;
  for (double x : raw) max_abs = std::max(max_abs, std::abs(x));

  DifferenceVector d;
  d.bound_ = bound;
  d.values_.assign(raw.begin(), raw.end());
  if (max_abs > 0.0) {
    // Divide first so the extreme entry lands on exactly +/-bound.
    for (double& x : d.values_) x = (x / max_abs) * bound;
  }
  return d;
}

DifferenceVector DifferenceVector::from_normalized(std::vector<double> values,
                                                   double bound) {
  require_bound(bound);
  require_finite(values, "difference vector");
  for (double x : values) {
    if (std::abs(x) > bound) {
      raise(ErrorKind::Validation, "difference value " + std::to_string(x) +
                                       " exceeds bound " +
                                       std::to_string(bound));
    }
  }
  DifferenceVector d;
  d.values_ = std::move(values);
  d.bound_ = bound;
  return d;
}

std::vector<double> difference_vector(std::span<const double> s_ecg,
                                      std::span<const double> s_face) {
  require_same_length(s_ecg.size(), s_face.size(), "difference_vector");
  std::vector<double> out(s_ecg.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s_ecg[i] - s_face[i];
  return out;
}

DifferenceVector normalize_difference(std::span<const double> raw,
                                      double bound) {
  return DifferenceVector::normalize(raw, bound);
}

std::vector<double> fused_scores(std::span<const double> c,
                                 const DifferenceVector& d, WeightSign sign) {
  require_same_length(c.size(), d.size(), "fused_scores");
  const double s = static_cast<double>(static_cast<int>(sign));
  const auto dv = d.values();
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = c[i] * (0.5 + s * dv[i]);
  }
  return out;
}

std::vector<double> final_score(std::span<const double> f_face,
                                std::span<const double> f_ecg) {
  require_same_length(f_face.size(), f_ecg.size(), "final_score");
  std::vector<double> out(f_face.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f_face[i] + f_ecg[i];
  return out;
}

FusionModel FusionModel::fit(std::span<const double> s_face,
                             std::span<const double> s_ecg, double bound) {
  FusionModel model;
  model.difference = normalize_difference(difference_vector(s_ecg, s_face), bound);
  return model;
}

void FusionModel::validate() const {
  if (modality_order[0].empty() || modality_order[1].empty() ||
      modality_order[0] == modality_order[1]) {
    raise(ErrorKind::Validation,
          "fusion model needs two distinct modality tags");
  }
  if (difference.size() < 2) {
    raise(ErrorKind::Validation, "fusion model needs at least 2 classes");
  }
  // Re-run the range check on the stored values.
  (void)DifferenceVector::from_normalized(
      {difference.values().begin(), difference.values().end()},
      difference.bound());
}

std::vector<double> fused_final_score(std::span<const double> c_face,
                                      std::span<const double> c_ecg,
                                      const FusionModel& model) {
  return final_score(fused_scores(c_face, model.difference, WeightSign::Minus),
                     fused_scores(c_ecg, model.difference, WeightSign::Plus));
}

ClassIndex predict_fused(std::span<const double> c_face,
                         std::span<const double> c_ecg,
                         const FusionModel& model) {
  return argmax(fused_final_score(c_face, c_ecg, model));
}

BaselineWeights compute_baseline_weights(double train_acc_face,
                                         double train_acc_ecg) {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(train_acc_face) || !in_unit(train_acc_ecg)) {
    raise(ErrorKind::InvalidArgument, "accuracies must lie in [0, 1]");
  }
  const double total = train_acc_face + train_acc_ecg;
  if (total == 0.0) {
    raise(ErrorKind::InvalidArgument,
          "cannot weight two models that are both 0% accurate");
  }
  return {train_acc_face / total, train_acc_ecg / total};
}

ClassIndex predict_weighted_sum(std::span<const double> c_face,
                                std::span<const double> c_ecg,
                                const BaselineWeights& w) {
  require_same_length(c_face.size(), c_ecg.size(), "predict_weighted_sum");
  std::vector<double> combined(c_face.size());
  for (std::size_t i = 0; i < combined.size(); ++i) {
    combined[i] = w.face * c_face[i] + w.ecg * c_ecg[i];
  }
  return argmax(combined);
}

}  // namespace hsf
