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
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hsf {

/// 0-based index of an enrolled subject (class).
using ClassIndex = std::size_t;

/// True class per sample, position-aligned with a ConfidenceMatrix.
using LabelVector = std::vector<ClassIndex>;

enum class ErrorKind {
  InvalidArgument,  // caller passed something outside the documented domain
  Validation,       // input data violates a contract (NaN, range, alignment)
  Runtime,          // a computation could not complete (e.g. calibration)
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

/// Collects non-fatal diagnostics (degenerate vectors, unbalanced folds).
/// Not synchronized: give each thread its own instance and merge.
class Warnings {
 public:
  void add(std::string message) { messages_.push_back(std::move(message)); }
  void merge(const Warnings& other) {
    messages_.insert(messages_.end(), other.messages_.begin(),
                     other.messages_.end());
  }
  bool empty() const noexcept { return messages_.empty(); }
  const std::vector<std::string>& messages() const noexcept {
    return messages_;
  }

 private:
  std::vector<std::string> messages_;
};

/// Top-n classes of a score vector, best first.
struct RankedPrediction {
  std::vector<ClassIndex> indices;
  std::vector<double> values;
};

/// Per-modality N x M matrix of confidence vectors, one row per sample.
class ConfidenceMatrix {
 public:
  ConfidenceMatrix() = default;

  /// `values` is row-major with `sample_ids.size()` rows of `num_classes`.
  ConfidenceMatrix(std::string modality, std::size_t num_classes,
                   std::vector<std::string> sample_ids,
                   std::vector<double> values);

  std::size_t num_samples() const noexcept { return sample_ids_.size(); }
  std::size_t num_classes() const noexcept { return num_classes_; }
  const std::string& modality() const noexcept { return modality_; }
  const std::vector<std::string>& sample_ids() const noexcept {
    return sample_ids_;
  }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * num_classes_, num_classes_};
  }
  std::span<const double> data() const noexcept { return values_; }

  friend bool operator==(const ConfidenceMatrix&,
                         const ConfidenceMatrix&) = default;

 private:
  std::string modality_;
  std::size_t num_classes_ = 0;
  std::vector<std::string> sample_ids_;
  std::vector<double> values_;
};

/// Index of the largest entry; the lowest index wins ties.
ClassIndex argmax(std::span<const double> v);

/// The n largest entries in descending order, lower index first on ties.
/// Throws InvalidArgument unless 1 <= n <= v.size().
RankedPrediction rank_top_n(std::span<const double> v, std::size_t n);

/// Affine rescale into [0, 1]. A constant vector maps to all zeros and adds
/// a degeneracy warning. Throws Validation on NaN/inf or fewer than two
/// entries.
std::vector<double> minmax_normalize(std::span<const double> raw,
                                     Warnings* warnings = nullptr);

void require_finite(std::span<const double> v, std::string_view what);

/// Deterministic child stream of `master` addressed by `path`, e.g.
/// {modality, subject}. Streams with different paths are independent.
std::mt19937_64 derive_stream(std::uint64_t master,
                              std::initializer_list<std::uint64_t> path);

}  // namespace hsf
