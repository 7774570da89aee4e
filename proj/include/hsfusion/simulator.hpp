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

// Synthetic classifier outputs.
//
// A sample of subject y is the logit vector  mu * e_y + sigma * z  with
// z ~ N(0, I), min-max normalized per sample. This models the effect of
// sensor noise on a classifier's confidence, not the sensor chain itself:
// a "degraded" subject simply draws with a larger sigma. Calibration picks
// sigma so that rank-1 accuracy matches a target.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hsfusion/core.hpp"
#include "hsfusion/evaluation.hpp"

namespace hsf {

struct GeneratorParams {
  double true_class_mean = 4.0;
  double noise_sigma_clean = 1.0;
  double noise_sigma_degraded = 2.0;
  std::size_t num_classes = 20;
  std::size_t samples_per_class = 20;

  /// Throws InvalidArgument on non-positive sigmas, fewer than two classes,
  /// or sigma_degraded <= sigma_clean.
  void validate() const;

  friend bool operator==(const GeneratorParams&,
                         const GeneratorParams&) = default;
};

/// Which subjects (1-based ids) each modality degrades.
struct DegradationScenario {
  std::string name;
  std::function<bool(std::size_t)> face_degraded;
  std::function<bool(std::size_t)> ecg_degraded;

  /// No subject degraded.
  static DegradationScenario clean();
  /// Face: ids divisible by 2 or 3. ECG: ids divisible by 7.
  static DegradationScenario awgn();
  /// Looks up "clean" or "awgn"; throws InvalidArgument otherwise.
  static DegradationScenario from_name(const std::string& name);
};

/// Fraction of subjects 1..num_classes for which `rule` holds.
double degraded_fraction(const std::function<bool(std::size_t)>& rule,
                         std::size_t num_classes);

/// One normalized confidence vector for a sample of `true_label`.
std::vector<double> generate_sample(ClassIndex true_label, bool degraded,
                                    const GeneratorParams& params,
                                    std::mt19937_64& rng);

/// Face and ECG matrices with shared labels, subject-major sample order.
/// Every (modality, subject) pair draws from its own substream of `seed`, so
/// the result does not depend on generation order.
Dataset generate_dataset(const GeneratorParams& face,
                         const GeneratorParams& ecg,
                         const DegradationScenario& scenario,
                         std::uint64_t seed);

/// Monte-Carlo rank-1 accuracy as a function of sigma, with common random
/// numbers: each trial stores g = max_{i != y} z_i - z_y and is correct iff
/// mu >= sigma * g. The estimate is therefore non-increasing in sigma.
class AccuracyCurve {
 public:
  AccuracyCurve(double true_class_mean, std::size_t num_classes,
                std::size_t trials, std::uint64_t seed);

  double operator()(double sigma) const;

 private:
  double mu_;
  std::vector<double> gaps_;
};

inline constexpr double kSigmaSearchMin = 1e-4;
inline constexpr double kSigmaSearchMax = 1e4;
inline constexpr double kCalibrationTolerance = 0.005;

struct CalibrationResult {
  GeneratorParams params;
  /// Monte-Carlo accuracy at the fitted parameters (mixed population for
  /// calibrate_degraded).
  double achieved_accuracy = 0.0;
  /// calibrate_degraded only: the target was below what degrading the
  /// affected subjects alone can reach, so the degraded sigma was pinned at
  /// kSigmaSearchMax and the clean sigma was re-fitted instead.
  bool refit_clean = false;
};

/// Bisection on noise_sigma_clean until the Monte-Carlo accuracy is within
/// kCalibrationTolerance of `target`. Throws Runtime when the accuracy
/// landscape is flat or does not bracket the target.
CalibrationResult calibrate(double target, const GeneratorParams& params_template,
                            std::size_t trials, std::uint64_t seed);

/// Fits noise_sigma_degraded so that a population with `degraded_share` of
/// subjects degraded (the rest at the template's clean sigma) reaches
/// `target_mixed`. See CalibrationResult::refit_clean for the fallback.
CalibrationResult calibrate_degraded(double target_mixed,
                                     const GeneratorParams& clean_fitted,
                                     double degraded_share, std::size_t trials,
                                     std::uint64_t seed);

/// Size presets: "desk" is 20 x 20, "full" is 87 x 100.
GeneratorParams preset(const std::string& name);

}  // namespace hsf
