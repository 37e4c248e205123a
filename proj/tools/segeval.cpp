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

// segeval: segmentation agreement metrics for 3D label masks.
//
//   segeval metrics  AUTO MANUAL            one pair, JSON on stdout
//   segeval evaluate MANIFEST OUT_DIR       full cohort report bundle
//   segeval anova    METRICS_CSV METRIC     ANOVA recomputed from metrics.csv
//   segeval subgroup METRICS_CSV            1.5T vs 3T comparison, JSON
//
// Exit codes: 0 ok, 1 I/O or manifest failure, 2 metric failure,
// 3 statistics failure.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "segeval/cohort.hpp"
#include "segeval/csv.hpp"
#include "segeval/error.hpp"
#include "segeval/report.hpp"

namespace {

using namespace segeval;

int exit_code(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::Input: return 1;
    case ErrorCategory::Metric: return 2;
    case ErrorCategory::Statistics: return 3;
  }
  return 1;
}

struct ConfigFlags {
  std::string space = "index";
  std::string connectivity = "6";
  std::string unit = "mm3";
  std::string pooling = "observation";
  std::string label = "nonzero";
  int threads = 0;

  EvalConfig to_config() const {
    EvalConfig c;
    c.space = parse_coordinate_space(space);
    c.connectivity = parse_connectivity(connectivity);
    c.unit = parse_volume_unit(unit);
    c.pooling = parse_pooling(pooling);
    c.default_rule = parse_binarize_rule(label);
    c.threads = threads;
    return c;
  }
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f, bool cohort) {
  cmd->add_option("--space", f.space, "Distance coordinates: index|physical")
      ->check(CLI::IsMember({"index", "physical"}))
      ->capture_default_str();
  cmd->add_option("--connectivity", f.connectivity, "Surface neighbourhood: 6|26")
      ->check(CLI::IsMember({"6", "26"}))
      ->capture_default_str();
  cmd->add_option("--unit", f.unit, "Volume unit: mm3|voxels")
      ->check(CLI::IsMember({"mm3", "voxels"}))
      ->capture_default_str();
  cmd->add_option("--label", f.label,
                  "Binarization: nonzero, V (equals V) or >T (greater than T)")
      ->capture_default_str();
  if (cohort) {
    cmd->add_option("--pooling", f.pooling, "ANOVA pooling: observation|subject")
        ->check(CLI::IsMember({"observation", "subject"}))
        ->capture_default_str();
    cmd->add_option("--threads", f.threads, "Worker threads (default: machine parallelism)")
        ->check(CLI::PositiveNumber);
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int run_metrics(const std::string& auto_path, const std::string& manual_path,
                const ConfigFlags& flags) {
  const EvalConfig config = flags.to_config();
  CaseSpec spec;
  spec.subject_id = "case";
  spec.method = "auto";
  spec.auto_path = auto_path;
  spec.manual_path = manual_path;
  std::cout << render_record_json(compute_case(spec, config), config);
  return 0;
}

int run_evaluate(const std::string& manifest, const std::string& out_dir,
                 const ConfigFlags& flags, const std::string& timestamp) {
  const EvalConfig config = flags.to_config();
  const auto cases = parse_manifest(manifest);
  const CohortResult result = evaluate_cohort(cases, config, manifest);
  ReportOptions options;
  options.timestamp = timestamp.empty() ? utc_now() : timestamp;
  write_bundle(render_bundle(result, options), out_dir);
  std::cerr << "evaluated " << result.records.size() << " cases (" << result.ok_count()
            << " ok, " << result.records.size() - result.ok_count() << " errors) -> " << out_dir
            << "\n";
  for (const auto& r : result.records)
    if (!r.ok) std::cerr << "  " << r.subject << "/" << r.method << "/" << r.structure << ": " << r.error << "\n";
  return 0;
}

int run_anova(const std::string& metrics_csv, const std::string& metric_name_arg,
              const std::string& pooling) {
  const Metric metric = parse_metric(metric_name_arg);
  const auto records = read_metrics_csv_file(metrics_csv);
  AnovaOutcome outcome;
  outcome.metric = metric;
  outcome.table = anova_for_metric(records, metric, parse_pooling(pooling));
  std::string text = render_anova_csv(std::span<const AnovaOutcome>(&outcome, 1), [&] {
    Provenance p;
    p.tool_version = std::string(kToolVersion);
    EvalConfig c;
    c.pooling = parse_pooling(pooling);
    p.config = c;
    p.config_hash = "recomputed";
    return p;
  }());
  // The config comment describes the recomputation, not the original run.
  text.erase(0, text.find('\n') + 1);
  std::cout << "# recomputed from " << metrics_csv << " pooling=" << pooling << "\n" << text;
  return 0;
}

int run_subgroup(const std::string& metrics_csv, const std::string& by) {
  if (by != "field_strength")
    throw Error(ErrorCode::InvalidArgument, "only --by field_strength is supported");
  std::ifstream in(metrics_csv, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + metrics_csv);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (!csv::parse(text).column("field_strength"))
    throw Error(ErrorCode::EmptySubgroup, "metrics table has no 'field_strength' column");
  const auto records = read_metrics_csv(text);
  std::cout << render_subgroup_json(subgroup_compare(records));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segmentation agreement metrics for 3D label masks"};
  app.require_subcommand(1);

  ConfigFlags metrics_flags;
  std::string auto_path, manual_path;
  auto* metrics = app.add_subcommand("metrics", "Compare one automatic mask with one manual mask");
  metrics->add_option("auto", auto_path, "Automatic segmentation volume")->required();
  metrics->add_option("manual", manual_path, "Manual segmentation volume")->required();
  add_config_flags(metrics, metrics_flags, false);

  ConfigFlags eval_flags;
  std::string manifest, out_dir, timestamp;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a cohort manifest and write reports");
  evaluate->add_option("manifest", manifest, "Manifest CSV or JSON lines")->required();
  evaluate->add_option("out_dir", out_dir, "Output directory")->required();
  evaluate->add_option("--timestamp", timestamp,
                       "Value recorded as generated_at in run_manifest.json (default: now, UTC)");
  add_config_flags(evaluate, eval_flags, true);

  std::string anova_csv, anova_metric, anova_pooling = "observation";
  auto* anova = app.add_subcommand("anova", "One-way ANOVA of one metric from metrics.csv");
  anova->add_option("metrics_csv", anova_csv, "metrics.csv written by evaluate")->required();
  anova->add_option("metric", anova_metric, "Metric column name")->required();
  anova->add_option("--pooling", anova_pooling, "observation|subject")
      ->check(CLI::IsMember({"observation", "subject"}))
      ->capture_default_str();

  std::string sub_csv, sub_by = "field_strength";
  auto* subgroup = app.add_subcommand("subgroup", "Compare field-strength subgroups from metrics.csv");
  subgroup->add_option("metrics_csv", sub_csv, "metrics.csv written by evaluate")->required();
  subgroup->add_option("--by", sub_by, "Partition column")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*metrics) return run_metrics(auto_path, manual_path, metrics_flags);
    if (*evaluate) return run_evaluate(manifest, out_dir, eval_flags, timestamp);
    if (*anova) return run_anova(anova_csv, anova_metric, anova_pooling);
    if (*subgroup) return run_subgroup(sub_csv, sub_by);
  } catch (const Error& e) {
    std::cerr << e.describe() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
