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

#include "hsfusion/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hsf {
namespace {

constexpr std::uint64_t kFaceStream = 0;
constexpr std::uint64_t kEcgStream = 1;
constexpr std::uint64_t kCalibrationStream = 0x63616c;  // "cal"
constexpr int kBisectionSteps = 100;

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

std::string format_subject(std::size_t subject, std::size_t sample) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "s%03zu_%03zu", subject, sample);
  return buf;
}

// Finds x in [lo, hi] (log scale) where the non-increasing `f` crosses
// `target`, returning the end of the final bracket whose value is closest.
template <typename F>
std::pair<double, double> bisect_decreasing(F&& f, double target, double lo,
                                            double hi) {
  double log_lo = std::log(lo), log_hi = std::log(hi);
  double f_lo = f(lo), f_hi = f(hi);
  for (int step = 0; step < kBisectionSteps; ++step) {
    const double mid = 0.5 * (log_lo + log_hi);
    const double f_mid = f(std::exp(mid));
    if (f_mid >= target) {
      log_lo = mid;
      f_lo = f_mid;
    } else {
      log_hi = mid;
      f_hi = f_mid;
    }
  }
  if (std::abs(f_lo - target) <= std::abs(f_hi - target)) {
    return {std::exp(log_lo), f_lo};
  }
  return {std::exp(log_hi), f_hi};
}

void check_target(double target) {
  if (!(target > 0.0 && target < 1.0)) {
    raise(ErrorKind::InvalidArgument, "calibration target must lie in (0, 1)");
  }
}

}  // namespace

void GeneratorParams::validate() const {
  if (num_classes < 2) {
    raise(ErrorKind::InvalidArgument, "simulator needs at least 2 classes");
  }
  if (samples_per_class < 1) {
    raise(ErrorKind::InvalidArgument, "simulator needs samples per class");
  }
  if (!std::isfinite(true_class_mean)) {
    raise(ErrorKind::InvalidArgument, "true_class_mean must be finite");
  }
  if (!positive_finite(noise_sigma_clean) ||
      !positive_finite(noise_sigma_degraded)) {
    raise(ErrorKind::InvalidArgument, "noise sigmas must be positive");
  }
  if (!(noise_sigma_degraded > noise_sigma_clean)) {
    raise(ErrorKind::InvalidArgument,
          "degraded sigma must exceed the clean sigma");
  }
}

DegradationScenario DegradationScenario::clean() {
  return {"clean", [](std::size_t) { return false; },
          [](std::size_t) { return false; }};
}

DegradationScenario DegradationScenario::awgn() {
  return {"awgn", [](std::size_t id) { return id % 2 == 0 || id % 3 == 0; },
          [](std::size_t id) { return id % 7 == 0; }};
}

DegradationScenario DegradationScenario::from_name(const std::string& name) {
  if (name == "clean") return clean();
  if (name == "awgn") return awgn();
  raise(ErrorKind::InvalidArgument,
        "unknown scenario '" + name + "' (expected clean or awgn)");
}

double degraded_fraction(const std::function<bool(std::size_t)>& rule,
                         std::size_t num_classes) {
  if (num_classes == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t id = 1; id <= num_classes; ++id) hits += rule(id);
  return static_cast<double>(hits) / static_cast<double>(num_classes);
}

std::vector<double> generate_sample(ClassIndex true_label, bool degraded,
                                    const GeneratorParams& params,
                                    std::mt19937_64& rng) {
  if (true_label >= params.num_classes) {
    raise(ErrorKind::InvalidArgument, "true label outside class range");
  }
  const double sigma =
      degraded ? params.noise_sigma_degraded : params.noise_sigma_clean;
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> logits(params.num_classes);
  for (double& x : logits) x = sigma * noise(rng);
  logits[true_label] += params.true_class_mean;
  return minmax_normalize(logits);
}

Dataset generate_dataset(const GeneratorParams& face,
                         const GeneratorParams& ecg,
                         const DegradationScenario& scenario,
                         std::uint64_t seed) {
  face.validate();
  ecg.validate();
  if (face.num_classes != ecg.num_classes ||
      face.samples_per_class != ecg.samples_per_class) {
    raise(ErrorKind::InvalidArgument,
          "face and ECG generators must agree on dataset size");
  }
  const std::size_t m = face.num_classes;
  const std::size_t per = face.samples_per_class;
  const std::size_t n = m * per;

  std::vector<std::string> ids;
  ids.reserve(n);
  LabelVector labels;
  labels.reserve(n);
  std::vector<double> face_values, ecg_values;
  face_values.reserve(n * m);
  ecg_values.reserve(n * m);

  for (std::size_t cls = 0; cls < m; ++cls) {
    const std::size_t subject = cls + 1;
    const bool face_bad = scenario.face_degraded(subject);
    const bool ecg_bad = scenario.ecg_degraded(subject);
    auto face_rng = derive_stream(seed, {kFaceStream, subject});
    auto ecg_rng = derive_stream(seed, {kEcgStream, subject});
    for (std::size_t j = 0; j < per; ++j) {
      ids.push_back(format_subject(subject, j + 1));
      labels.push_back(cls);
      const auto f = generate_sample(cls, face_bad, face, face_rng);
      const auto e = generate_sample(cls, ecg_bad, ecg, ecg_rng);
      face_values.insert(face_values.end(), f.begin(), f.end());
      ecg_values.insert(ecg_values.end(), e.begin(), e.end());
    }
  }

  Dataset data;
  data.face = ConfidenceMatrix("face", m, ids, std::move(face_values));
  data.ecg = ConfidenceMatrix("ecg", m, std::move(ids), std::move(ecg_values));
  data.labels = std::move(labels);
  data.class_labels.reserve(m);
  for (std::size_t s = 1; s <= m; ++s) data.class_labels.push_back(std::to_string(s));
  return data;
}

AccuracyCurve::AccuracyCurve(double true_class_mean, std::size_t num_classes,
                             std::size_t trials, std::uint64_t seed)
    : mu_(true_class_mean) {
  if (num_classes < 2) {
    raise(ErrorKind::InvalidArgument, "accuracy curve needs 2+ classes");
  }
  if (trials == 0) raise(ErrorKind::InvalidArgument, "need at least 1 trial");
  auto rng = derive_stream(seed, {kCalibrationStream, num_classes});
  std::normal_distribution<double> noise(0.0, 1.0);
  gaps_.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    // Class 0 is the true class; ties resolve to the lowest index, i.e. to
    // the truth, hence ">=" in operator().
    const double truth = noise(rng);
    double rival = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < num_classes; ++i) rival = std::max(rival, noise(rng));
    gaps_.push_back(rival - truth);
  }
}

double AccuracyCurve::operator()(double sigma) const {
  std::size_t correct = 0;
  for (double g : gaps_) correct += mu_ >= sigma * g;
  return static_cast<double>(correct) / static_cast<double>(gaps_.size());
}

CalibrationResult calibrate(double target, const GeneratorParams& params_template,
                            std::size_t trials, std::uint64_t seed) {
  check_target(target);
  const AccuracyCurve curve(params_template.true_class_mean,
                            params_template.num_classes, trials, seed);
  const double best = curve(kSigmaSearchMin);
  const double worst = curve(kSigmaSearchMax);
  if (best - worst <= kCalibrationTolerance) {
    raise(ErrorKind::Runtime,
          "accuracy does not respond to noise (flat landscape at " +
              std::to_string(best) + "); cannot calibrate");
  }
  if (target > best + kCalibrationTolerance ||
      target < worst - kCalibrationTolerance) {
    raise(ErrorKind::Runtime, "target " + std::to_string(target) +
                                  " is outside the reachable accuracy range [" +
                                  std::to_string(worst) + ", " +
                                  std::to_string(best) + "]");
  }

  const auto [sigma, achieved] =
      bisect_decreasing(curve, target, kSigmaSearchMin, kSigmaSearchMax);
  if (std::abs(achieved - target) > kCalibrationTolerance) {
    raise(ErrorKind::Runtime, "calibration stalled at accuracy " +
                                  std::to_string(achieved));
  }
  CalibrationResult out;
  out.params = params_template;
  out.params.noise_sigma_clean = sigma;
  if (!(out.params.noise_sigma_degraded > sigma)) {
    out.params.noise_sigma_degraded = kSigmaSearchMax;
  }
  out.achieved_accuracy = achieved;
  return out;
}

CalibrationResult calibrate_degraded(double target_mixed,
                                     const GeneratorParams& clean_fitted,
                                     double degraded_share, std::size_t trials,
                                     std::uint64_t seed) {
  check_target(target_mixed);
  if (!(degraded_share > 0.0 && degraded_share <= 1.0)) {
    raise(ErrorKind::InvalidArgument, "degraded share must lie in (0, 1]");
  }
  const AccuracyCurve curve(clean_fitted.true_class_mean,
                            clean_fitted.num_classes, trials, seed);
  const double w = degraded_share;
  const double clean_acc = curve(clean_fitted.noise_sigma_clean);
  auto mixed_over_degraded = [&](double s) {
    return (1.0 - w) * clean_acc + w * curve(s);
  };

  CalibrationResult out;
  out.params = clean_fitted;
  const double ceiling = mixed_over_degraded(clean_fitted.noise_sigma_clean);
  const double floor = mixed_over_degraded(kSigmaSearchMax);
  if (target_mixed > ceiling + kCalibrationTolerance) {
    raise(ErrorKind::Runtime,
          "mixed target " + std::to_string(target_mixed) +
              " exceeds the clean-population accuracy " + std::to_string(ceiling));
  }

  if (target_mixed >= floor - kCalibrationTolerance) {
    const auto [sigma, achieved] = bisect_decreasing(
        mixed_over_degraded, target_mixed, clean_fitted.noise_sigma_clean,
        kSigmaSearchMax);
    out.params.noise_sigma_degraded =
        std::max(sigma, std::nextafter(clean_fitted.noise_sigma_clean,
                                       kSigmaSearchMax));
    out.achieved_accuracy = achieved;
  } else {
    // Degrading the affected subjects alone cannot get this low: pin them at
    // the noise ceiling and lower everyone else's accuracy instead.
    const double pinned = curve(kSigmaSearchMax);
    auto mixed_over_clean = [&](double s) {
      return (1.0 - w) * curve(s) + w * pinned;
    };
    if (target_mixed < mixed_over_clean(kSigmaSearchMax) - kCalibrationTolerance) {
      raise(ErrorKind::Runtime, "mixed target " + std::to_string(target_mixed) +
                                    " is below chance level");
    }
    const auto [sigma, achieved] = bisect_decreasing(
        mixed_over_clean, target_mixed, kSigmaSearchMin, kSigmaSearchMax);
    out.params.noise_sigma_clean = sigma;
    out.params.noise_sigma_degraded = kSigmaSearchMax;
    out.achieved_accuracy = achieved;
    out.refit_clean = true;
  }
  if (std::abs(out.achieved_accuracy - target_mixed) > kCalibrationTolerance) {
    raise(ErrorKind::Runtime, "calibration stalled at accuracy " +
                                  std::to_string(out.achieved_accuracy));
  }
  return out;
}

GeneratorParams preset(const std::string& name) {
  GeneratorParams p;
  if (name == "desk") {
    p.num_classes = 20;
    p.samples_per_class = 20;
  } else if (name == "full") {
    p.num_classes = 87;
    p.samples_per_class = 100;
  } else {
    raise(ErrorKind::InvalidArgument,
          "unknown preset '" + name + "' (expected desk or full)");
  }
  return p;
}

}  // namespace hsf
