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

#include "hsfusion/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "json.hpp"

namespace hsf {
namespace {

using nlohmann::json;

constexpr std::string_view kScoreMagic = "#hsfusion-scores";
constexpr std::string_view kReportFormat = "hsfusion-report";
constexpr std::string_view kModelFormat = "hsfusion-model";
constexpr int kFormatVersion = 1;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

[[noreturn]] void line_error(const std::string& path, std::size_t line,
                             const std::string& what) {
  raise(ErrorKind::Validation,
        path + ":" + std::to_string(line) + ": " + what);
}

std::string percent(double acc, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << acc * 100.0;
  return os.str();
}

json fold_to_json(const FoldResult& r) {
  return {{"fold_id", r.fold_id},
          {"test_count", r.test_count},
          {"acc_face", r.acc_face},
          {"acc_ecg", r.acc_ecg},
          {"acc_fused", r.acc_fused},
          {"acc_weighted_sum", r.acc_weighted_sum},
          {"error_count_fused", r.error_count_fused}};
}

json summary_to_json(const SystemSummary& s) {
  return {{"mean", s.mean}, {"std", s.std}};
}

SystemSummary summary_from_json(const json& j) {
  return {j.at("mean").get<double>(), j.at("std").get<double>()};
}

void check_format(const json& j, std::string_view expected) {
  if (!j.is_object() || j.value("format", std::string()) != expected) {
    raise(ErrorKind::Validation,
          "not a " + std::string(expected) + " document");
  }
  if (j.value("version", 0) != kFormatVersion) {
    raise(ErrorKind::Validation, "unsupported " + std::string(expected) +
                                     " version");
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) raise(ErrorKind::Io, "failed writing '" + path + "'");
}

ScoreFile load_score_matrix(const std::string& path, bool normalize,
                            Warnings* warnings) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::Io, "cannot open '" + path + "' for reading");

  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!trim(line).empty()) return true;
    }
    return false;
  };

  // Header: "#hsfusion-scores modality=<tag> classes=<M>".
  if (!next_line()) raise(ErrorKind::Validation, path + ": empty score file");
  std::string modality;
  std::size_t declared_classes = 0;
  {
    std::istringstream hs{std::string(trim(line))};
    std::string token;
    hs >> token;
    if (token != kScoreMagic) {
      line_error(path, line_no, "missing '#hsfusion-scores' header");
    }
    while (hs >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) line_error(path, line_no, "bad header field '" + token + "'");
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      if (key == "modality") {
        modality = value;
      } else if (key == "classes") {
        const auto parsed = parse_double(value);
        if (!parsed || *parsed < 2 || *parsed != std::floor(*parsed)) {
          line_error(path, line_no, "classes must be an integer >= 2");
        }
        declared_classes = static_cast<std::size_t>(*parsed);
      }
    }
    if (modality.empty() || declared_classes == 0) {
      line_error(path, line_no, "header must name modality and classes");
    }
  }

  if (!next_line()) line_error(path, line_no, "missing column header");
  const auto columns = split(line, ',');
  if (columns.size() != declared_classes + 2 || columns[0] != "sample_id" ||
      columns[1] != "true_label") {
    line_error(path, line_no,
               "column header must be sample_id,true_label and " +
                   std::to_string(declared_classes) + " class labels");
  }
  ScoreFile out;
  std::unordered_map<std::string, ClassIndex> label_index;
  for (std::size_t c = 2; c < columns.size(); ++c) {
    std::string label(columns[c]);
    if (label.empty() || !label_index.emplace(label, c - 2).second) {
      line_error(path, line_no, "class labels must be unique and non-empty");
    }
    out.class_labels.push_back(std::move(label));
  }

  const std::size_t m = declared_classes;
  std::vector<std::string> ids;
  std::vector<double> values;
  std::vector<double> row(m);
  std::unordered_map<std::string, std::size_t> seen_ids;
  while (next_line()) {
    const auto fields = split(line, ',');
    if (fields.size() != m + 2) {
      line_error(path, line_no, "expected " + std::to_string(m + 2) +
                                    " fields, got " +
                                    std::to_string(fields.size()));
    }
    std::string id(fields[0]);
    if (id.empty()) line_error(path, line_no, "empty sample_id");
    if (!seen_ids.emplace(id, line_no).second) {
      line_error(path, line_no, "duplicate sample_id '" + id + "'");
    }
    const auto label = label_index.find(std::string(fields[1]));
    if (label == label_index.end()) {
      line_error(path, line_no, "label '" + std::string(fields[1]) +
                                    "' is not one of the class columns");
    }
    for (std::size_t c = 0; c < m; ++c) {
      const auto v = parse_double(fields[c + 2]);
      if (!v || !std::isfinite(*v)) {
        line_error(path, line_no, "bad confidence value '" +
                                      std::string(fields[c + 2]) + "'");
      }
      row[c] = *v;
    }
    if (normalize) {
      Warnings local;
      const auto normalized = minmax_normalize(row, &local);
      if (warnings && !local.empty()) {
        warnings->add(path + ":" + std::to_string(line_no) +
                      ": constant score row normalized to zeros");
      }
      values.insert(values.end(), normalized.begin(), normalized.end());
    } else {
      for (double v : row) {
        if (v < 0.0 || v > 1.0) {
          line_error(path, line_no,
                     "value outside [0, 1] and normalization is disabled");
        }
      }
      values.insert(values.end(), row.begin(), row.end());
    }
    ids.push_back(std::move(id));
    out.labels.push_back(label->second);
  }
  if (ids.empty()) raise(ErrorKind::Validation, path + ": no data rows");
  out.matrix = ConfidenceMatrix(modality, m, std::move(ids), std::move(values));
  return out;
}

void write_score_matrix(const std::string& path, const ConfidenceMatrix& matrix,
                        const LabelVector& labels,
                        const std::vector<std::string>& class_labels) {
  if (labels.size() != matrix.num_samples() ||
      class_labels.size() != matrix.num_classes()) {
    raise(ErrorKind::InvalidArgument, "score matrix, labels and class list disagree");
  }
  std::ostringstream os;
  os << kScoreMagic << " modality=" << matrix.modality()
     << " classes=" << matrix.num_classes() << '\n';
  os << "sample_id,true_label";
  for (const auto& c : class_labels) os << ',' << c;
  os << '\n';
  for (std::size_t i = 0; i < matrix.num_samples(); ++i) {
    os << matrix.sample_ids()[i] << ',' << class_labels.at(labels[i]);
    for (double v : matrix.row(i)) os << ',' << format_double(v);
    os << '\n';
  }
  write_text_file(path, os.str());
}

Dataset load_dataset(const std::string& face_path, const std::string& ecg_path,
                     bool normalize, Warnings* warnings) {
  ScoreFile face = load_score_matrix(face_path, normalize, warnings);
  ScoreFile ecg = load_score_matrix(ecg_path, normalize, warnings);
  if (face.class_labels != ecg.class_labels) {
    raise(ErrorKind::Validation, "face and ECG files list different classes");
  }
  if (face.matrix.num_samples() != ecg.matrix.num_samples()) {
    raise(ErrorKind::Validation, "face and ECG files have different sample sets");
  }

  std::unordered_map<std::string_view, std::size_t> ecg_row;
  for (std::size_t i = 0; i < ecg.matrix.num_samples(); ++i) {
    ecg_row.emplace(ecg.matrix.sample_ids()[i], i);
  }
  const std::size_t m = face.matrix.num_classes();
  std::vector<double> aligned;
  aligned.reserve(ecg.matrix.data().size());
  for (std::size_t i = 0; i < face.matrix.num_samples(); ++i) {
    const auto& id = face.matrix.sample_ids()[i];
    const auto it = ecg_row.find(id);
    if (it == ecg_row.end()) {
      raise(ErrorKind::Validation, "sample '" + id + "' missing from " + ecg_path);
    }
    if (ecg.labels[it->second] != face.labels[i]) {
      raise(ErrorKind::Validation, "sample '" + id + "' has different labels in the two files");
    }
    const auto r = ecg.matrix.row(it->second);
    aligned.insert(aligned.end(), r.begin(), r.end());
  }

  Dataset data;
  data.ecg = ConfidenceMatrix(ecg.matrix.modality(), m, face.matrix.sample_ids(),
                              std::move(aligned));
  data.face = std::move(face.matrix);
  data.labels = std::move(face.labels);
  data.class_labels = std::move(face.class_labels);
  data.validate();
  return data;
}

void export_dataset(const Dataset& data, const std::string& face_path,
                    const std::string& ecg_path) {
  data.validate();
  std::vector<std::string> labels = data.class_labels;
  if (labels.empty()) {
    for (std::size_t i = 0; i < data.num_classes(); ++i) labels.push_back(std::to_string(i));
  }
  write_score_matrix(face_path, data.face, data.labels, labels);
  write_score_matrix(ecg_path, data.ecg, data.labels, labels);
}

std::string render_report_text(const ExperimentReport& report) {
  std::ostringstream os;
  os << "# folds=" << report.folds << " seed=" << report.seed
     << " bound=" << format_double(report.bound)
     << " rank_depth=" << report.rank_depth << " scenario=" << report.scenario
     << '\n';
  os << "Fold | Face Test Accuracy (%) | ECG Test Accuracy (%) | "
        "Proposed Fusion Test Accuracy (%) | Weighted Sum Test Accuracy (%)\n";
  for (const auto& r : report.per_fold) {
    os << r.fold_id + 1 << " | " << percent(r.acc_face, 3) << " | "
       << percent(r.acc_ecg, 3) << " | " << percent(r.acc_fused, 3) << " | "
       << percent(r.acc_weighted_sum, 3) << '\n';
  }
  auto cell = [](const SystemSummary& s) {
    return percent(s.mean, 3) + " ± " + percent(s.std, 2);
  };
  os << "avg ± std | " << cell(report.face) << " | " << cell(report.ecg)
     << " | " << cell(report.fused) << " | " << cell(report.weighted_sum)
     << '\n';
  return os.str();
}

std::string render_report_json(const ExperimentReport& report) {
  json folds = json::array();
  for (const auto& r : report.per_fold) folds.push_back(fold_to_json(r));
  const json doc = {
      {"format", kReportFormat},
      {"version", kFormatVersion},
      {"config",
       {{"folds", report.folds},
        {"seed", report.seed},
        {"bound", report.bound},
        {"rank_depth", report.rank_depth},
        {"scenario", report.scenario}}},
      {"folds", std::move(folds)},
      {"summary",
       {{"face", summary_to_json(report.face)},
        {"ecg", summary_to_json(report.ecg)},
        {"fused", summary_to_json(report.fused)},
        {"weighted_sum", summary_to_json(report.weighted_sum)}}}};
  return doc.dump(2) + "\n";
}

ExperimentReport parse_report_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    check_format(doc, kReportFormat);
    ExperimentReport r;
    const auto& cfg = doc.at("config");
    r.folds = cfg.at("folds").get<std::size_t>();
    r.seed = cfg.at("seed").get<std::uint64_t>();
    r.bound = cfg.at("bound").get<double>();
    r.rank_depth = cfg.at("rank_depth").get<std::size_t>();
    r.scenario = cfg.at("scenario").get<std::string>();
    for (const auto& f : doc.at("folds")) {
      FoldResult fr;
      fr.fold_id = f.at("fold_id").get<std::size_t>();
      fr.test_count = f.at("test_count").get<std::size_t>();
      fr.acc_face = f.at("acc_face").get<double>();
      fr.acc_ecg = f.at("acc_ecg").get<double>();
      fr.acc_fused = f.at("acc_fused").get<double>();
      fr.acc_weighted_sum = f.at("acc_weighted_sum").get<double>();
      fr.error_count_fused = f.at("error_count_fused").get<std::size_t>();
      r.per_fold.push_back(fr);
    }
    r.summarize();
    const auto& s = doc.at("summary");
    if (summary_from_json(s.at("face")) != r.face ||
        summary_from_json(s.at("ecg")) != r.ecg ||
        summary_from_json(s.at("fused")) != r.fused ||
        summary_from_json(s.at("weighted_sum")) != r.weighted_sum) {
      raise(ErrorKind::Validation,
            "report summary does not match its per-fold rows");
    }
    return r;
  } catch (const json::exception& e) {
    raise(ErrorKind::Validation, std::string("malformed report: ") + e.what());
  }
}

void write_report(const ExperimentReport& report, const std::string& path,
                  ReportFormat format) {
  write_text_file(path, format == ReportFormat::Json
                            ? render_report_json(report)
                            : render_report_text(report));
}

ExperimentReport read_report(const std::string& path) {
  return parse_report_json(read_text_file(path));
}

std::string render_model_json(const StoredModel& stored) {
  stored.model.validate();
  const auto d = stored.model.difference.values();
  const json doc = {
      {"format", kModelFormat},
      {"version", kFormatVersion},
      {"bound", stored.model.difference.bound()},
      {"modality_order",
       {stored.model.modality_order[0], stored.model.modality_order[1]}},
      {"difference", std::vector<double>(d.begin(), d.end())},
      {"class_labels", stored.class_labels}};
  return doc.dump(2) + "\n";
}

StoredModel parse_model_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    check_format(doc, kModelFormat);
    StoredModel out;
    const auto order = doc.at("modality_order").get<std::vector<std::string>>();
    if (order.size() != 2) {
      raise(ErrorKind::Validation, "modality_order must list two modalities");
    }
    out.model.modality_order = {order[0], order[1]};
    out.model.difference = DifferenceVector::from_normalized(
        doc.at("difference").get<std::vector<double>>(),
        doc.at("bound").get<double>());
    out.class_labels = doc.value("class_labels", std::vector<std::string>{});
    if (!out.class_labels.empty() &&
        out.class_labels.size() != out.model.difference.size()) {
      raise(ErrorKind::Validation, "class_labels length does not match model");
    }
    out.model.validate();
    return out;
  } catch (const json::exception& e) {
    raise(ErrorKind::Validation, std::string("malformed model: ") + e.what());
  }
}

void save_model(const StoredModel& stored, const std::string& path) {
  write_text_file(path, render_model_json(stored));
}

StoredModel load_model(const std::string& path) {
  return parse_model_json(read_text_file(path));
}

SignalFile read_signal(const std::string& path,
                       std::optional<double> sample_rate) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::Io, "cannot open '" + path + "' for reading");

  SignalFile out;
  std::vector<double> times;
  bool format_known = false;
  bool header_allowed = true;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto fields = split(t, ',');
    if (!format_known) {
      out.format = fields.size() == 2 ? SignalFormat::TimeValueCsv
                                      : SignalFormat::Lines;
    }
    std::vector<std::optional<double>> parsed;
    for (auto f : fields) parsed.push_back(parse_double(f));
    const bool numeric = std::all_of(parsed.begin(), parsed.end(),
                                     [](const auto& v) { return v.has_value(); });
    if (!numeric && header_allowed) {
      header_allowed = false;
      continue;
    }
    header_allowed = false;
    format_known = true;
    const std::size_t want = out.format == SignalFormat::TimeValueCsv ? 2 : 1;
    if (fields.size() != want || !numeric) {
      line_error(path, line_no, "expected " + std::to_string(want) +
                                    " numeric field(s)");
    }
    if (want == 2) {
      times.push_back(*parsed[0]);
      out.signal.samples.push_back(*parsed[1]);
    } else {
      out.signal.samples.push_back(*parsed[0]);
    }
  }
  if (out.signal.samples.empty()) {
    raise(ErrorKind::Validation, path + ": no signal samples");
  }
  require_finite(out.signal.samples, path);

  if (sample_rate) {
    out.signal.sample_rate = *sample_rate;
  } else if (out.format == SignalFormat::TimeValueCsv && times.size() >= 2) {
    const double span = times.back() - times.front();
    if (!(span > 0.0)) {
      raise(ErrorKind::Validation, path + ": time column is not increasing");
    }
    const double rate = static_cast<double>(times.size() - 1) / span;
    // Printed time stamps are rounded; snap to the integer rate they encode.
    const double nearest = std::round(rate);
    out.signal.sample_rate =
        std::abs(rate - nearest) <= 1e-9 * nearest ? nearest : rate;
  } else {
    out.signal.sample_rate = kDefaultSampleRate;
  }
  if (!(out.signal.sample_rate > 0.0) || !std::isfinite(out.signal.sample_rate)) {
    raise(ErrorKind::InvalidArgument, "sample rate must be positive");
  }
  return out;
}

void write_signal(const std::string& path, const EcgSignal& signal,
                  SignalFormat format) {
  std::ostringstream os;
  if (format == SignalFormat::TimeValueCsv) {
    os << "time,value\n";
    for (std::size_t i = 0; i < signal.samples.size(); ++i) {
      os << format_double(static_cast<double>(i) / signal.sample_rate) << ','
         << format_double(signal.samples[i]) << '\n';
    }
  } else {
    for (double v : signal.samples) os << format_double(v) << '\n';
  }
  write_text_file(path, os.str());
}

}  // namespace hsf
