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
#include <functional>
#include <vector>

namespace hsf {

inline constexpr double kDefaultSampleRate = 512.0;
inline constexpr double kDefaultGateSeconds = 4.0;

/// Single-lead ECG record.
struct EcgSignal {
  std::vector<double> samples;
  double sample_rate = kDefaultSampleRate;

  friend bool operator==(const EcgSignal&, const EcgSignal&) = default;
};

struct PeakDetectorConfig {
  /// A candidate must reach this fraction of the signal's global maximum.
  double threshold_fraction = 0.8;
  /// Only peaks starting within this many seconds are considered.
  double search_window_seconds = 1.5;
};

/// Detector hook: returns the sample index of the first R peak.
using PeakDetector = std::function<std::size_t(const EcgSignal&)>;

struct PreprocessOptions {
  double duration_seconds = kDefaultGateSeconds;
  PeakDetectorConfig detector;
  /// Replaces the built-in threshold detector when set.
  PeakDetector custom_detector;
};

/// Min-max rescale into [0, 1]. Constant signals are rejected.
EcgSignal normalize_amplitude(const EcgSignal& sig);

EcgSignal zero_mean(const EcgSignal& sig);

/// First local maximum (strictly above its left neighbour, strictly above
/// the sample after its plateau) inside the search window whose value is at
/// least threshold_fraction times the global maximum. Plateaus report their
/// first sample. Throws Validation when nothing qualifies.
std::size_t find_first_r_peak(const EcgSignal& sig,
                              const PeakDetectorConfig& cfg = {});

/// Contiguous slice [peak_index, peak_index + round(duration * rate)). No
/// padding: throws Validation if the signal ends too early.
EcgSignal gate_signal(const EcgSignal& sig, std::size_t peak_index,
                      double duration_seconds = kDefaultGateSeconds);

/// normalize_amplitude -> zero_mean -> R-peak detection -> gate_signal, then
/// the gated window is re-centred so the output itself has zero mean.
EcgSignal preprocess(const EcgSignal& sig, const PreprocessOptions& opts = {});

}  // namespace hsf
