// Copyright 2026 The segeval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "fixtures.hpp"
#include "json.hpp"
#include "segeval/csv.hpp"
#include "segeval/error.hpp"
#include "segeval/report.hpp"

using namespace segeval;
using nlohmann::json;

namespace {

struct Cohort {
  fixtures::TempDir dir;
  std::vector<CaseSpec> cases;

  Cohort() {
    fixtures::CohortOptions o;
    o.subjects = 5;
    o.both_sides = true;
    o.dims = {20, 20, 20};
    o.tag_field_strength = true;
    o.t1_5_subjects = 2;
    cases = parse_manifest(fixtures::write_synthetic_cohort(dir.path(), o));
  }
};

const Cohort& cohort() {
  static const Cohort c;
  return c;
}

ReportBundle bundle(int threads) {
  EvalConfig config;
  config.threads = threads;
  ReportOptions options;
  options.timestamp = "2026-01-01T00:00:00Z";
  return render_bundle(evaluate_cohort(cohort().cases, config, "manifest.csv"), options);
}

}  // namespace

TEST_CASE("anova.csv has one Columns/Error/Total block per metric") {
  const auto b = bundle(2);
  const auto doc = csv::parse(b.anova_csv);
  CHECK(doc.header == std::vector<std::string>{"Measurement", "Source", "SS", "df", "MS", "F",
                                               "P-value", "SS_exact", "MS_exact", "F_exact",
                                               "P_exact"});
  REQUIRE(doc.rows.size() == 27);
  std::map<std::string, int> per_metric;
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const auto& f = doc.rows[i].fields;
    per_metric[f[0]]++;
    CHECK(f[1] == std::vector<std::string>{"Columns", "Error", "Total"}[i % 3]);
  }
  CHECK(per_metric.size() == 9);
  for (const auto& [name, count] : per_metric) CHECK(count == 3);

  // 5 subjects x 2 sides x 3 methods = 30 observations.
  const auto& columns = doc.rows[0].fields;
  CHECK(columns[3] == "2");
  CHECK(doc.rows[1].fields[3] == "27");
  CHECK(doc.rows[2].fields[3] == "29");
  CHECK(doc.rows[2].fields[4] == "-");
  CHECK(doc.comments.front().rfind(" segeval 1.0.0 config_hash=", 0) == 0);
}

TEST_CASE("re-running the ANOVA on metrics.csv reproduces anova.csv") {
  const auto b = bundle(1);
  const auto records = read_metrics_csv(b.metrics_csv);
  const auto doc = csv::parse(b.anova_csv);
  std::size_t row = 0;
  for (Metric m : metrics_by_name()) {
    const auto t = anova_for_metric(records, m, Pooling::Observation);
    const auto& c = doc.rows[row].fields;
    const auto& e = doc.rows[row + 1].fields;
    CHECK(c[0] == metric_name(m));
    CHECK(std::abs(csv::parse_real(c[7]) - t.ss_between) <= 1e-10 * std::max(1.0, t.ss_between));
    CHECK(std::abs(csv::parse_real(e[7]) - t.ss_within) <= 1e-10 * std::max(1.0, t.ss_within));
    CHECK(std::abs(csv::parse_real(c[9]) - t.f) <= 1e-10 * std::max(1.0, t.f));
    CHECK(std::abs(csv::parse_real(c[10]) - t.p) <= 1e-10);
    CHECK(c[6] == csv::scientific(t.p, kPValueDecimals));
    row += 3;
  }
}

TEST_CASE("metrics.csv round trip") {
  const EvalConfig config;
  const auto result = evaluate_cohort(cohort().cases, config);
  const auto text = render_metrics_csv(result.records, result.provenance);
  const auto back = read_metrics_csv(text);
  REQUIRE(back.size() == result.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    const auto& a = result.records[i];
    const auto& b = back[i];
    CHECK(b.subject == a.subject);
    CHECK(b.method == a.method);
    CHECK(b.structure == a.structure);
    CHECK(b.field_strength == a.field_strength);
    CHECK(b.ok == a.ok);
    for (std::size_t k = 0; k < kMetricCount; ++k) CHECK(std::abs(b.values[k] - a.values[k]) <= 0.5e-4 + 1e-12);
  }
  CHECK(render_metrics_csv(back, result.provenance) == text);
}

TEST_CASE("csv quoting") {
  const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", "#lead", "line\nbreak", ""};
  const std::string text = "a,b,c,d,e,f\n" + csv::join(fields) + "\n";
  const auto doc = csv::parse(text);
  REQUIRE(doc.rows.size() == 1);
  CHECK(doc.rows[0].fields == fields);
  CHECK_THROWS_AS(csv::parse("a,b\n1,2,3\n"), Error);
  CHECK_THROWS_AS(csv::parse("a,b\n\"open,2\n"), Error);
  CHECK(csv::fixed(0.66666, 4) == "0.6667");
  CHECK(csv::fixed(-0.0, 4) == "0.0000");
  CHECK(csv::fixed(-0.00004, 4) == "0.0000");
  CHECK(csv::fixed(-0.00005001, 4) == "-0.0001");
  CHECK(csv::scientific(0.000123, 2) == "1.23E-04");
  CHECK(std::isnan(csv::parse_real("")));
}

TEST_CASE("error records keep their diagnostics") {
  MetricRecord ok;
  ok.subject = "s1";
  ok.method = "A";
  ok.structure = "left_hippocampus";
  ok.ok = true;
  ok.values.fill(0.5);
  MetricRecord bad = ok;
  bad.method = "B";
  bad.ok = false;
  bad.values.fill(std::nan(""));
  bad.error = "GridMismatch: (4,4,4) vs (4,4,5)";
  const std::vector<MetricRecord> rs{ok, bad};
  const auto text = render_metrics_csv(rs, {});
  const auto back = read_metrics_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(!back[1].ok);
  CHECK(back[1].error == bad.error);
  CHECK(std::isnan(back[1].values[0]));
}

TEST_CASE("JSON artifacts are well formed") {
  const auto b = bundle(2);
  const auto box = json::parse(b.boxplot_json);
  REQUIRE(box["metrics"].size() == 9);
  const auto& first = box["metrics"][0];
  REQUIRE(first["methods"].size() == 3);
  for (const auto& m : first["methods"]) {
    CHECK(m["n"] == 10);
    CHECK(m["min"].get<double>() <= m["q1"].get<double>());
    CHECK(m["q1"].get<double>() <= m["median"].get<double>());
    CHECK(m["median"].get<double>() <= m["q3"].get<double>());
    CHECK(m["q3"].get<double>() <= m["max"].get<double>());
  }
  const auto scatter = json::parse(b.scatter_json);
  CHECK(scatter["series"].size() == 27);
  CHECK(scatter["series"][0]["points"].size() == 10);
  const auto run = json::parse(b.run_manifest_json);
  CHECK(run["generated_at"] == "2026-01-01T00:00:00Z");
  CHECK(run["config"]["space"] == "index");
  CHECK(run["config"]["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("bundles are byte-identical across runs and worker counts") {
  const auto a = bundle(1);
  const auto b = bundle(3);
  const auto c = bundle(1);
  CHECK(a.metrics_csv == b.metrics_csv);
  CHECK(a.anova_csv == b.anova_csv);
  CHECK(a.volumes_csv == b.volumes_csv);
  CHECK(a.boxplot_json == b.boxplot_json);
  CHECK(a.scatter_json == b.scatter_json);
  CHECK(a.run_manifest_json == b.run_manifest_json);
  CHECK(a.metrics_csv == c.metrics_csv);

  fixtures::TempDir out;
  write_bundle(a, out.path());
  CHECK(fixtures::read_text(out / "metrics.csv") == a.metrics_csv);
  CHECK(fixtures::read_text(out / "anova.csv") == a.anova_csv);
  CHECK(fixtures::read_text(out / "run_manifest.json") == a.run_manifest_json);
  for (const auto& entry : std::filesystem::directory_iterator(out.path()))
    CHECK(entry.path().extension() != ".tmp");
}

TEST_CASE("volumes.csv pairs both sides per subject and method") {
  const auto b = bundle(2);
  const auto doc = csv::parse(b.volumes_csv);
  CHECK(doc.rows.size() == 15);
  CHECK(doc.header.size() == 8);
  for (const auto& r : doc.rows) {
    const double va = csv::parse_real(r.fields[2]), vm = csv::parse_real(r.fields[3]);
    CHECK(std::abs(csv::parse_real(r.fields[4]) - std::abs(va - vm) / vm) <= 1e-3);
  }
}
