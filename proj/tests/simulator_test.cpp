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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hsfusion/simulator.hpp"
#include "test_support.hpp"

namespace hsf {
namespace {

constexpr std::size_t kTrials = 20000;

// Empirical rank-1 accuracy of generate_sample, independent of the
// calibration curve's common random numbers.
double sampled_accuracy(const GeneratorParams& p, bool degraded,
                        std::size_t draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> cls(0, p.num_classes - 1);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    const std::size_t y = cls(rng);
    hits += testing::reference_argmax(generate_sample(y, degraded, p, rng)) == y;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

TEST(GenerateSample, NoiselessLimitIsOneHot) {
  GeneratorParams p;
  p.noise_sigma_clean = 1e-9;
  p.num_classes = 6;
  std::mt19937_64 rng(1);
  for (std::size_t y = 0; y < 6; ++y) {
    const auto v = generate_sample(y, false, p, rng);
    EXPECT_EQ(testing::reference_argmax(v), y);
    EXPECT_EQ(v[y], 1.0);
    for (std::size_t i = 0; i < 6; ++i) {
      if (i != y) {
        EXPECT_LT(v[i], 1e-6);
      }
    }
  }
}

TEST(GenerateSample, SeededDrawsRepeat) {
  GeneratorParams p;
  std::mt19937_64 a(42), b(42);
  EXPECT_EQ(generate_sample(3, false, p, a), generate_sample(3, false, p, b));
}

TEST(GenerateSample, OutputIsNormalized) {
  GeneratorParams p;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto v = generate_sample(i % p.num_classes, i % 2 == 0, p, rng);
    EXPECT_EQ(*std::min_element(v.begin(), v.end()), 0.0);
    EXPECT_EQ(*std::max_element(v.begin(), v.end()), 1.0);
  }
}

TEST(Calibrate, CalibratedSigmaReproducesTargetInFreshDraws) {
  const GeneratorParams tmpl = preset("full");
  const auto fit = calibrate(0.961, tmpl, kTrials, 0);
  EXPECT_NEAR(fit.achieved_accuracy, 0.961, kCalibrationTolerance);
  EXPECT_NEAR(sampled_accuracy(fit.params, false, 100000, 99), 0.961, 0.01);
}

TEST(Calibrate, FaceCleanTarget) {
  const auto fit = calibrate(0.988, preset("full"), kTrials, 3);
  EXPECT_GE(fit.achieved_accuracy, 0.983);
  EXPECT_LE(fit.achieved_accuracy, 0.993);
  EXPECT_GT(fit.params.noise_sigma_clean, 0.0);
}

TEST(Calibrate, FlatLandscapeIsAnError) {
  GeneratorParams p;
  p.num_classes = 2;
  p.true_class_mean = 0.0;
  try {
    calibrate(0.5, p, kTrials, 0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Runtime);
  }
}

TEST(Calibrate, UnreachableTargetIsAnError) {
  GeneratorParams p;
  p.num_classes = 2;
  // Chance level for two classes is 0.5; 0.1 cannot be reached.
  EXPECT_THROW(calibrate(0.1, p, kTrials, 0), Error);
  EXPECT_THROW(calibrate(1.5, p, kTrials, 0), Error);
}

TEST(Calibrate, AccuracyNeverRisesWithNoise) {
  GeneratorParams p = preset("desk");
  double previous = 1.0;
  for (double sigma = 0.25; sigma <= 8.0; sigma *= 1.5) {
    p.noise_sigma_clean = sigma;
    p.noise_sigma_degraded = 2 * sigma;
    const double acc = sampled_accuracy(p, false, 20000, 5);
    // Independent draws per sigma: allow Monte-Carlo error.
    EXPECT_LE(acc, previous + 0.01) << "sigma " << sigma;
    previous = acc;
  }
  const AccuracyCurve curve(4.0, 20, kTrials, 1);
  double last = 1.0;
  for (double sigma = 0.01; sigma < 100.0; sigma *= 1.1) {
    ASSERT_LE(curve(sigma), last);
    last = curve(sigma);
  }
}

TEST(CalibrateDegraded, FaceMixedTarget) {
  const auto tmpl = preset("full");
  const auto clean = calibrate(0.988, tmpl, kTrials, 0);
  const double share = degraded_fraction(DegradationScenario::awgn().face_degraded, 87);
  const auto mixed = calibrate_degraded(0.666, clean.params, share, kTrials, 0);
  EXPECT_FALSE(mixed.refit_clean);
  EXPECT_NEAR(mixed.achieved_accuracy, 0.666, kCalibrationTolerance);
  EXPECT_EQ(mixed.params.noise_sigma_clean, clean.params.noise_sigma_clean);
  EXPECT_GT(mixed.params.noise_sigma_degraded, mixed.params.noise_sigma_clean);

  // Cross-check the mixture with fresh draws.
  const double acc = (1 - share) * sampled_accuracy(mixed.params, false, 40000, 7) +
                     share * sampled_accuracy(mixed.params, true, 40000, 8);
  EXPECT_NEAR(acc, 0.666, 0.015);
}

TEST(CalibrateDegraded, EcgMixedTargetNeedsCleanRefit) {
  const auto clean = calibrate(0.961, preset("full"), kTrials, 0);
  const double share = degraded_fraction(DegradationScenario::awgn().ecg_degraded, 87);
  const auto mixed = calibrate_degraded(0.763, clean.params, share, kTrials, 0);
  EXPECT_TRUE(mixed.refit_clean);
  EXPECT_NEAR(mixed.achieved_accuracy, 0.763, kCalibrationTolerance);
  EXPECT_GT(mixed.params.noise_sigma_clean, clean.params.noise_sigma_clean);
  EXPECT_EQ(mixed.params.noise_sigma_degraded, kSigmaSearchMax);
}

TEST(Scenario, DegradationFlagsForAllDefaultSubjects) {
  const auto s = DegradationScenario::awgn();
  for (std::size_t id = 1; id <= 87; ++id) {
    EXPECT_EQ(s.face_degraded(id), id % 2 == 0 || id % 3 == 0) << id;
    EXPECT_EQ(s.ecg_degraded(id), id % 7 == 0) << id;
  }
  EXPECT_TRUE(s.face_degraded(14) && s.ecg_degraded(14));
  EXPECT_TRUE(s.face_degraded(21) && s.ecg_degraded(21));
  EXPECT_FALSE(s.face_degraded(1) || s.ecg_degraded(1));
  EXPECT_FALSE(s.face_degraded(5) || s.ecg_degraded(5));
  const auto c = DegradationScenario::clean();
  for (std::size_t id = 1; id <= 87; ++id) {
    EXPECT_FALSE(c.face_degraded(id) || c.ecg_degraded(id));
  }
  EXPECT_THROW(DegradationScenario::from_name("fog"), Error);
}

TEST(GenerateDataset, FullPresetShape) {
  GeneratorParams p = preset("full");
  p.noise_sigma_clean = 1.0;
  const auto d = generate_dataset(p, p, DegradationScenario::clean(), 1);
  EXPECT_EQ(d.face.num_samples(), 8700u);
  EXPECT_EQ(d.ecg.num_samples(), 8700u);
  EXPECT_EQ(d.num_classes(), 87u);
  EXPECT_EQ(d.class_labels.front(), "1");
  EXPECT_EQ(d.class_labels.back(), "87");
  EXPECT_NO_THROW(d.validate());
}

TEST(GenerateDataset, ReproducibleAndSeedSensitive) {
  const GeneratorParams p = preset("desk");
  const auto a = generate_dataset(p, p, DegradationScenario::awgn(), 3);
  const auto b = generate_dataset(p, p, DegradationScenario::awgn(), 3);
  const auto c = generate_dataset(p, p, DegradationScenario::awgn(), 4);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.face, c.face);
  // Independent modality streams.
  EXPECT_FALSE(std::ranges::equal(a.face.data(), a.ecg.data()));
}

TEST(GenerateDataset, DegradedSubjectsAreNoisier) {
  GeneratorParams p = preset("desk");
  p.samples_per_class = 200;
  p.noise_sigma_clean = 0.5;
  p.noise_sigma_degraded = 20.0;
  const auto d = generate_dataset(p, p, DegradationScenario::awgn(), 5);
  std::vector<std::size_t> hits(p.num_classes, 0);
  for (std::size_t i = 0; i < d.num_samples(); ++i) {
    const auto row = d.face.row(i);
    hits[d.labels[i]] +=
        testing::reference_argmax({row.begin(), row.end()}) == d.labels[i];
  }
  EXPECT_EQ(hits[0], 200u);   // subject 1: clean
  EXPECT_EQ(hits[4], 200u);   // subject 5: clean
  EXPECT_LT(hits[13], 100u);  // subject 14: degraded
}

TEST(Preset, Sizes) {
  EXPECT_EQ(preset("desk").num_classes, 20u);
  EXPECT_EQ(preset("full").samples_per_class, 100u);
  EXPECT_THROW(preset("huge"), Error);
}

}  // namespace
}  // namespace hsf
