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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hsfusion/io.hpp"
#include "hsfusion/simulator.hpp"
#include "test_support.hpp"

namespace hsf {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = testing::scratch_dir("io"); }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = (dir_ / name).string();
    std::ofstream(p) << text;
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  ErrorKind kind_of_load(const std::string& p, bool normalize = true) {
    try {
      load_score_matrix(p, normalize);
    } catch (const Error& e) {
      return e.kind();
    }
    ADD_FAILURE() << "load succeeded";
    return ErrorKind::Runtime;
  }

  fs::path dir_;
};

constexpr const char* kFixture =
    "#hsfusion-scores modality=face classes=2\n"
    "sample_id,true_label,A,B\n"
    "s1,A,0.9,0.1\n"
    "s2,B,0.2,0.8\n"
    "s3,B,0.4,0.6\n";

TEST_F(IoTest, LoadsFixture) {
  const auto f = load_score_matrix(write("a.csv", kFixture), false);
  EXPECT_EQ(f.matrix.num_samples(), 3u);
  EXPECT_EQ(f.matrix.num_classes(), 2u);
  EXPECT_EQ(f.labels, (LabelVector{0, 1, 1}));
  EXPECT_EQ(f.class_labels, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(f.matrix.row(2)[1], 0.6);
  EXPECT_EQ(f.matrix.modality(), "face");
}

TEST_F(IoTest, NormalizesRawScores) {
  const auto p = write("raw.csv",
                       "#hsfusion-scores modality=ecg classes=3\n"
                       "sample_id,true_label,1,2,3\n"
                       "x,3,2.0,4.0,3.0\n");
  const auto f = load_score_matrix(p, true);
  EXPECT_EQ(f.matrix.row(0)[0], 0.0);
  EXPECT_EQ(f.matrix.row(0)[1], 1.0);
  EXPECT_EQ(f.matrix.row(0)[2], 0.5);
  EXPECT_EQ(kind_of_load(p, false), ErrorKind::Validation);
}

TEST_F(IoTest, ErrorsNameTheLine) {
  const auto p = write("bad.csv",
                       "#hsfusion-scores modality=face classes=2\n"
                       "sample_id,true_label,A,B\n"
                       "s1,A,0.9,0.1\n"
                       "s2,B,0.2,0.8,0.0\n");
  try {
    load_score_matrix(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Validation);
    EXPECT_NE(std::string(e.what()).find(":4:"), std::string::npos) << e.what();
  }
}

TEST_F(IoTest, RejectsBadRows) {
  const std::string head =
      "#hsfusion-scores modality=face classes=2\nsample_id,true_label,A,B\n";
  EXPECT_EQ(kind_of_load(write("l.csv", head + "s1,C,0.9,0.1\n")), ErrorKind::Validation);
  EXPECT_EQ(kind_of_load(write("d.csv", head + "s1,A,0.9,0.1\ns1,B,0.1,0.9\n")),
            ErrorKind::Validation);
  EXPECT_EQ(kind_of_load(write("n.csv", head + "s1,A,nan,0.1\n")), ErrorKind::Validation);
  EXPECT_EQ(kind_of_load(write("x.csv", head + "s1,A,abc,0.1\n")), ErrorKind::Validation);
  EXPECT_EQ(kind_of_load(write("h.csv", "sample_id,true_label,A,B\n")),
            ErrorKind::Validation);
  EXPECT_EQ(kind_of_load(path("missing.csv")), ErrorKind::Io);
}

TEST_F(IoTest, DatasetAlignsEcgRowsByFaceOrder) {
  const auto face = write("f.csv", kFixture);
  const auto ecg = write("e.csv",
                         "#hsfusion-scores modality=ecg classes=2\n"
                         "sample_id,true_label,A,B\n"
                         "s3,B,0.3,0.7\n"
                         "s1,A,0.6,0.4\n"
                         "s2,B,0.1,0.9\n");
  const auto d = load_dataset(face, ecg, false);
  EXPECT_EQ(d.ecg.sample_ids(), d.face.sample_ids());
  EXPECT_EQ(d.ecg.row(0)[0], 0.6);
  EXPECT_EQ(d.ecg.row(2)[1], 0.7);
}

TEST_F(IoTest, DatasetRejectsMismatchedSampleSets) {
  const auto face = write("f.csv", kFixture);
  const auto ecg = write("e.csv",
                         "#hsfusion-scores modality=ecg classes=2\n"
                         "sample_id,true_label,A,B\n"
                         "s1,A,0.6,0.4\n"
                         "s2,B,0.1,0.9\n"
                         "s9,B,0.3,0.7\n");
  EXPECT_THROW(load_dataset(face, ecg, false), Error);
}

TEST_F(IoTest, ExportRoundTripsExactly) {
  GeneratorParams p = preset("desk");
  const auto d = generate_dataset(p, p, DegradationScenario::awgn(), 12);
  export_dataset(d, path("f.csv"), path("e.csv"));
  EXPECT_EQ(load_dataset(path("f.csv"), path("e.csv"), true), d);
  EXPECT_EQ(load_dataset(path("f.csv"), path("e.csv"), false), d);
}

ExperimentReport sample_report() {
  GeneratorParams p = preset("desk");
  const auto d = generate_dataset(p, p, DegradationScenario::awgn(), 1);
  EvaluationConfig cfg;
  cfg.scenario = "awgn";
  return run_experiment(d, cfg);
}

TEST_F(IoTest, TextReportLayout) {
  const auto rep = sample_report();
  std::istringstream in(render_report_text(rep));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 1 + 1 + 10 + 1u);
  EXPECT_EQ(lines[0].rfind("# folds=10 seed=0 bound=0.2 rank_depth=5 scenario=awgn", 0), 0u);
  EXPECT_EQ(lines[1],
            "Fold | Face Test Accuracy (%) | ECG Test Accuracy (%) | "
            "Proposed Fusion Test Accuracy (%) | Weighted Sum Test Accuracy (%)");
  EXPECT_EQ(lines.back().rfind("avg ± std | ", 0), 0u);
  // Five columns in every row.
  for (std::size_t i = 1; i < lines.size(); ++i) {
    EXPECT_EQ(std::count(lines[i].begin(), lines[i].end(), '|'), 4) << lines[i];
  }
}

TEST_F(IoTest, JsonReportRoundTrips) {
  const auto rep = sample_report();
  write_report(rep, path("r.json"), ReportFormat::Json);
  EXPECT_EQ(read_report(path("r.json")), rep);
}

TEST_F(IoTest, TamperedSummaryIsRejected) {
  auto text = render_report_json(sample_report());
  const auto pos = text.find("\"mean\": 0.");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 10, "\"mean\": 0.1");
  EXPECT_THROW(parse_report_json(text), Error);
  EXPECT_THROW(parse_report_json("{\"format\": \"other\"}"), Error);
  EXPECT_THROW(parse_report_json("not json"), Error);
}

TEST_F(IoTest, UnwritablePathIsIoError) {
  try {
    write_report(sample_report(), path("no/such/dir/r.txt"), ReportFormat::Text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

TEST_F(IoTest, ModelRoundTrips) {
  StoredModel m;
  m.model = FusionModel::fit(std::vector<double>{0.3, 0.8, 0.7},
                             std::vector<double>{0.9, 0.2, 0.71});
  m.class_labels = {"a", "b", "c"};
  save_model(m, path("m.json"));
  EXPECT_EQ(load_model(path("m.json")), m);
  EXPECT_THROW(parse_model_json(
                   R"({"format":"hsfusion-model","version":1,"bound":0.2,)"
                   R"("modality_order":["face","ecg"],"difference":[0.3,0.0]})"),
               Error);
}

TEST_F(IoTest, SignalFormats) {
  const auto lines = write("s.txt", "0.1\n0.5\n0.2\n");
  const auto a = read_signal(lines);
  EXPECT_EQ(a.format, SignalFormat::Lines);
  EXPECT_EQ(a.signal.sample_rate, 512.0);
  EXPECT_EQ(a.signal.samples, (std::vector<double>{0.1, 0.5, 0.2}));

  std::ostringstream csv;
  csv << "time,value\n";
  for (int i = 0; i < 1000; ++i) csv << i / 250.0 << ',' << (i % 7) << '\n';
  const auto b = read_signal(write("s.csv", csv.str()));
  EXPECT_EQ(b.format, SignalFormat::TimeValueCsv);
  EXPECT_EQ(b.signal.sample_rate, 250.0);
  EXPECT_EQ(read_signal(path("s.csv"), 100.0).signal.sample_rate, 100.0);

  write_signal(path("o.csv"), b.signal, SignalFormat::TimeValueCsv);
  const auto c = read_signal(path("o.csv"));
  EXPECT_EQ(c.signal, b.signal);

  EXPECT_THROW(read_signal(write("bad.txt", "0.1\nabc\n")), Error);
  EXPECT_THROW(read_signal(write("empty.txt", "")), Error);
}

}  // namespace
}  // namespace hsf
