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

#include "hsfusion/ecg_prep.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsfusion/core.hpp"

namespace hsf {
namespace {

void check_signal(const EcgSignal& sig) {
  if (sig.samples.empty()) raise(ErrorKind::Validation, "empty ECG signal");
  if (!(sig.sample_rate > 0.0) || !std::isfinite(sig.sample_rate)) {
    raise(ErrorKind::InvalidArgument, "sample rate must be positive");
  }
  require_finite(sig.samples, "ECG signal");
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

EcgSignal normalize_amplitude(const EcgSignal& sig) {
  check_signal(sig);
  const auto [lo, hi] = std::minmax_element(sig.samples.begin(), sig.samples.end());
  const double min = *lo;
  const double range = *hi - min;
  if (range == 0.0) {
    raise(ErrorKind::Validation, "degenerate ECG signal: constant amplitude");
  }
  EcgSignal out{{}, sig.sample_rate};
  out.samples.reserve(sig.samples.size());
  for (double x : sig.samples) out.samples.push_back((x - min) / range);
  return out;
}

EcgSignal zero_mean(const EcgSignal& sig) {
  check_signal(sig);
  EcgSignal out = sig;
  const double m = mean_of(out.samples);
  for (double& x : out.samples) x -= m;
  // Second pass removes the rounding residue of the first.
  const double residue = mean_of(out.samples);
  for (double& x : out.samples) x -= residue;
  return out;
}

std::size_t find_first_r_peak(const EcgSignal& sig,
                              const PeakDetectorConfig& cfg) {
  check_signal(sig);
  if (!(cfg.threshold_fraction > 0.0 && cfg.threshold_fraction < 1.0)) {
    raise(ErrorKind::InvalidArgument, "threshold fraction must lie in (0, 1)");
  }
  if (!(cfg.search_window_seconds > 0.0)) {
    raise(ErrorKind::InvalidArgument, "search window must be positive");
  }
  const auto& x = sig.samples;
  const std::size_t n = x.size();
  const double global_max = *std::max_element(x.begin(), x.end());
  const double threshold = cfg.threshold_fraction * global_max;
  const auto window = static_cast<std::size_t>(
      std::ceil(cfg.search_window_seconds * sig.sample_rate));
  const std::size_t last = std::min(window, n);

  for (std::size_t i = 1; i < last; ++i) {
    if (!(x[i] > x[i - 1]) || x[i] < threshold) continue;
    std::size_t j = i + 1;
    while (j < n && x[j] == x[i]) ++j;
    if (j < n && x[j] < x[i]) return i;
  }
  raise(ErrorKind::Validation, "no R peak found in the first " +
                                   std::to_string(cfg.search_window_seconds) +
                                   " s");
}

EcgSignal gate_signal(const EcgSignal& sig, std::size_t peak_index,
                      double duration_seconds) {
  check_signal(sig);
  if (!(duration_seconds > 0.0)) {
    raise(ErrorKind::InvalidArgument, "gate duration must be positive");
  }
  if (peak_index >= sig.samples.size()) {
    raise(ErrorKind::InvalidArgument, "peak index beyond signal end");
  }
  const auto length =
      static_cast<std::size_t>(std::llround(duration_seconds * sig.sample_rate));
  const std::size_t available = sig.samples.size() - peak_index;
  if (length > available) {
    raise(ErrorKind::Validation,
          "insufficient data after R peak: need " + std::to_string(length) +
              " samples, have " + std::to_string(available));
  }
  const auto first = sig.samples.begin() + static_cast<std::ptrdiff_t>(peak_index);
  return {{first, first + static_cast<std::ptrdiff_t>(length)}, sig.sample_rate};
}

EcgSignal preprocess(const EcgSignal& sig, const PreprocessOptions& opts) {
  const EcgSignal centred = zero_mean(normalize_amplitude(sig));
  const std::size_t peak = opts.custom_detector
                               ? opts.custom_detector(centred)
                               : find_first_r_peak(centred, opts.detector);
  return zero_mean(gate_signal(centred, peak, opts.duration_seconds));
}

}  // namespace hsf
