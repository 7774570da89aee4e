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

#include "hsfusion/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <thread>

#include "hsfusion/subject_scoring.hpp"

namespace hsf {
namespace {

double rank1_accuracy(const ConfidenceMatrix& m, const LabelVector& labels,
                      std::span<const std::size_t> rows) {
  std::size_t correct = 0;
  for (std::size_t r : rows) correct += argmax(m.row(r)) == labels[r];
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

ScoringConfig scoring_config(std::size_t rows, std::size_t num_classes,
                             std::size_t rank_depth) {
  ScoringConfig cfg;
  cfg.rank_depth = rank_depth;
  cfg.samples_per_class =
      static_cast<double>(rows) / static_cast<double>(num_classes);
  return cfg;
}

}  // namespace

void Dataset::validate() const {
  const std::size_t n = labels.size();
  if (face.num_samples() != n || ecg.num_samples() != n) {
    raise(ErrorKind::Validation,
          "modalities disagree on sample count (face " +
              std::to_string(face.num_samples()) + ", ecg " +
              std::to_string(ecg.num_samples()) + ", labels " +
              std::to_string(n) + ")");
  }
  if (face.num_classes() != ecg.num_classes()) {
    raise(ErrorKind::Validation, "modalities disagree on class count");
  }
  if (face.sample_ids() != ecg.sample_ids()) {
    raise(ErrorKind::Validation, "modalities are not aligned by sample id");
  }
  if (!class_labels.empty() && class_labels.size() != face.num_classes()) {
    raise(ErrorKind::Validation, "class label list does not match M");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= face.num_classes()) {
      raise(ErrorKind::Validation, "label of sample '" + face.sample_ids()[i] +
                                       "' out of range");
    }
  }
}

std::vector<std::size_t> FoldAssignment::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of_sample.size(); ++i) {
    if (fold_of_sample[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of_sample.size(); ++i) {
    if (fold_of_sample[i] == fold) out.push_back(i);
  }
  return out;
}

FoldAssignment make_folds(std::span<const ClassIndex> labels, std::size_t k,
                          std::uint64_t seed) {
  if (k < 2) raise(ErrorKind::InvalidArgument, "need at least 2 folds");
  if (labels.empty()) raise(ErrorKind::Validation, "no samples to partition");

  std::map<ClassIndex, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  for (const auto& [cls, idx] : members) {
    if (idx.size() < k) {
      raise(ErrorKind::Validation,
            "class " + std::to_string(cls) + " has " +
                std::to_string(idx.size()) + " samples, fewer than " +
                std::to_string(k) + " folds");
    }
  }

  FoldAssignment out;
  out.k = k;
  out.seed = seed;
  out.fold_of_sample.assign(labels.size(), 0);
  std::size_t offset = 0;
  for (auto& [cls, idx] : members) {
    auto rng = derive_stream(seed, {0x666f6c64 /* "fold" */, cls});
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t p = 0; p < idx.size(); ++p) {
      out.fold_of_sample[idx[p]] = (offset + p) % k;
    }
    offset = (offset + idx.size()) % k;
  }
  return out;
}

double accuracy(std::span<const ClassIndex> predictions,
                std::span<const ClassIndex> labels) {
  if (predictions.size() != labels.size()) {
    raise(ErrorKind::InvalidArgument, "prediction/label length mismatch");
  }
  if (labels.empty()) raise(ErrorKind::InvalidArgument, "accuracy of nothing");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    correct += predictions[i] == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

SystemSummary summarize(std::span<const double> values) {
  SystemSummary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

void ExperimentReport::summarize() {
  std::vector<double> f, e, u, w;
  for (const auto& r : per_fold) {
    f.push_back(r.acc_face);
    e.push_back(r.acc_ecg);
    u.push_back(r.acc_fused);
    w.push_back(r.acc_weighted_sum);
  }
  face = hsf::summarize(f);
  ecg = hsf::summarize(e);
  fused = hsf::summarize(u);
  weighted_sum = hsf::summarize(w);
}

FusionModel fit_fusion_model(const Dataset& data,
                             std::span<const std::size_t> rows,
                             std::size_t rank_depth, double bound,
                             Warnings* warnings) {
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(data.num_samples());
    std::iota(all.begin(), all.end(), std::size_t{0});
    rows = all;
  }
  const ScoringConfig sc =
      scoring_config(rows.size(), data.num_classes(), rank_depth);
  const auto s_face =
      compute_subject_scores(data.face, data.labels, rows, sc, warnings);
  // The balance warning is identical for both modalities; report it once.
  const auto s_ecg =
      compute_subject_scores(data.ecg, data.labels, rows, sc, nullptr);
  return FusionModel::fit(s_face, s_ecg, bound);
}

FoldResult evaluate_fold(const Dataset& data, const FoldAssignment& assignment,
                         std::size_t fold_id, const EvaluationConfig& cfg,
                         Warnings* warnings) {
  if (assignment.fold_of_sample.size() != data.num_samples()) {
    raise(ErrorKind::InvalidArgument, "fold assignment does not cover dataset");
  }
  if (fold_id >= assignment.k) {
    raise(ErrorKind::InvalidArgument, "fold id out of range");
  }
  const auto train = assignment.train_indices(fold_id);
  const auto test = assignment.test_indices(fold_id);
  if (test.empty()) raise(ErrorKind::Validation, "empty test fold");

  const FusionModel model =
      fit_fusion_model(data, train, cfg.rank_depth, cfg.bound, warnings);
  const BaselineWeights weights =
      compute_baseline_weights(rank1_accuracy(data.face, data.labels, train),
                               rank1_accuracy(data.ecg, data.labels, train));

  std::vector<ClassIndex> truth, p_face, p_ecg, p_fused, p_ws;
  for (std::size_t r : test) {
    const auto cf = data.face.row(r);
    const auto ce = data.ecg.row(r);
    truth.push_back(data.labels[r]);
    p_face.push_back(argmax(cf));
    p_ecg.push_back(argmax(ce));
    p_fused.push_back(predict_fused(cf, ce, model));
    p_ws.push_back(predict_weighted_sum(cf, ce, weights));
  }

  FoldResult out;
  out.fold_id = fold_id;
  out.test_count = test.size();
  out.acc_face = accuracy(p_face, truth);
  out.acc_ecg = accuracy(p_ecg, truth);
  out.acc_fused = accuracy(p_fused, truth);
  out.acc_weighted_sum = accuracy(p_ws, truth);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    out.error_count_fused += p_fused[i] != truth[i];
  }
  return out;
}

ExperimentReport run_experiment(const Dataset& data,
                                const EvaluationConfig& cfg,
                                Warnings* warnings) {
  data.validate();
  if (cfg.rank_depth < 1 || cfg.rank_depth > data.num_classes()) {
    raise(ErrorKind::InvalidArgument,
          "rank depth " + std::to_string(cfg.rank_depth) + " outside [1, " +
              std::to_string(data.num_classes()) + "]");
  }
  const FoldAssignment folds = make_folds(data.labels, cfg.folds, cfg.seed);

  std::vector<FoldResult> results(cfg.folds);
  std::vector<Warnings> fold_warnings(cfg.folds);
  std::vector<std::exception_ptr> errors(cfg.folds);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t f = next++; f < cfg.folds; f = next++) {
      try {
        results[f] = evaluate_fold(data, folds, f, cfg, &fold_warnings[f]);
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(cfg.threads, 1, cfg.folds);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  if (warnings) {
    for (const auto& w : fold_warnings) warnings->merge(w);
  }

  ExperimentReport report;
  report.per_fold = std::move(results);
  report.folds = cfg.folds;
  report.seed = cfg.seed;
  report.bound = cfg.bound;
  report.rank_depth = cfg.rank_depth;
  report.scenario = cfg.scenario;
  report.summarize();
  return report;
}

}  // namespace hsf
