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

#include "hsfusion/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace hsf {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
      return "invalid-argument";
    case ErrorKind::Validation:
      return "validation";
    case ErrorKind::Runtime:
      return "runtime";
    case ErrorKind::Io:
      return "io";
  }
  return "unknown";
}

void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

ConfidenceMatrix::ConfidenceMatrix(std::string modality,
                                   std::size_t num_classes,
                                   std::vector<std::string> sample_ids,
                                   std::vector<double> values)
    : modality_(std::move(modality)),
      num_classes_(num_classes),
      sample_ids_(std::move(sample_ids)),
      values_(std::move(values)) {
  if (num_classes_ < 2) {
    raise(ErrorKind::Validation, "confidence matrix needs at least 2 classes");
  }
  if (values_.size() != sample_ids_.size() * num_classes_) {
    raise(ErrorKind::Validation,
          "confidence matrix has " + std::to_string(values_.size()) +
              " values for " + std::to_string(sample_ids_.size()) +
              " samples x " + std::to_string(num_classes_) + " classes");
  }
  require_finite(values_, "confidence matrix");
  std::unordered_set<std::string_view> seen;
  seen.reserve(sample_ids_.size());
  for (const auto& id : sample_ids_) {
    if (!seen.insert(id).second) {
      raise(ErrorKind::Validation, "duplicate sample id '" + id + "'");
    }
  }
}

ClassIndex argmax(std::span<const double> v) {
  if (v.empty()) raise(ErrorKind::InvalidArgument, "argmax of empty vector");
  ClassIndex best = 0;
  for (ClassIndex i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

RankedPrediction rank_top_n(std::span<const double> v, std::size_t n) {
  if (n < 1 || n > v.size()) {
    raise(ErrorKind::InvalidArgument,
          "rank depth " + std::to_string(n) + " outside [1, " +
              std::to_string(v.size()) + "]");
  }
  std::vector<ClassIndex> order(v.size());
  std::iota(order.begin(), order.end(), ClassIndex{0});
  auto better = [&](ClassIndex a, ClassIndex b) {
    return v[a] > v[b] || (v[a] == v[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + n, order.end(), better);
  order.resize(n);

  RankedPrediction out;
  out.values.reserve(n);
  for (ClassIndex i : order) out.values.push_back(v[i]);
  out.indices = std::move(order);
  return out;
}

std::vector<double> minmax_normalize(std::span<const double> raw,
                                     Warnings* warnings) {
  if (raw.size() < 2) {
    raise(ErrorKind::Validation, "normalization needs at least 2 values");
  }
  require_finite(raw, "score vector");
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double min = *lo;
  const double range = *hi - min;
  std::vector<double> out(raw.size(), 0.0);
  if (range == 0.0) {
    if (warnings) warnings->add("constant score vector normalized to zeros");
    return out;
  }
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - min) / range;
  return out;
}

void require_finite(std::span<const double> v, std::string_view what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      raise(ErrorKind::Validation, std::string(what) +
                                       ": non-finite value at position " +
                                       std::to_string(i));
    }
  }
}

std::mt19937_64 derive_stream(std::uint64_t master,
                              std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * path.size());
  auto push = [&](std::uint64_t x) {
    words.push_back(static_cast<std::uint32_t>(x));
    words.push_back(static_cast<std::uint32_t>(x >> 32));
  };
  push(master);
  for (std::uint64_t p : path) push(p);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace hsf
