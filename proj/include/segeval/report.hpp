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

/// \file report.hpp
/// Serialization of cohort results: metrics.csv, volumes.csv, anova.csv,
/// boxplot.json, scatter.json and run_manifest.json.
///
/// CSV numbers are fixed at 4 decimals; p-values print as "%.2E". anova.csv
/// is computed from metrics.csv as written, so re-running the ANOVA on that
/// file reproduces it exactly.

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segeval/cohort.hpp"

namespace segeval {

inline constexpr int kCsvDecimals = 4;
inline constexpr int kPValueDecimals = 2;

struct ReportBundle {
  std::string metrics_csv;
  std::string volumes_csv;
  std::string anova_csv;
  std::string boxplot_json;
  std::string scatter_json;
  std::string run_manifest_json;
};

struct ReportOptions {
  /// Written to run_manifest.json as "generated_at" when set.
  std::optional<std::string> timestamp;
};

std::string config_comment(const Provenance& p);

std::string render_metrics_csv(std::span<const MetricRecord> records, const Provenance& p);
/// Throws MalformedCsv.
std::vector<MetricRecord> read_metrics_csv(std::string_view text);
std::vector<MetricRecord> read_metrics_csv_file(const std::filesystem::path& path);

/// Table with Columns/Error/Total rows per successful outcome; failed
/// outcomes become comment lines.
std::string render_anova_csv(std::span<const AnovaOutcome> outcomes, const Provenance& p);
std::string render_volumes_csv(std::span<const VolumeRow> rows, const Provenance& p);
std::string render_boxplot_json(std::span<const MetricRecord> records, const Provenance& p);
std::string render_scatter_json(std::span<const MetricRecord> records, const Provenance& p);
std::string render_run_manifest_json(const CohortResult& result,
                                     std::span<const AnovaOutcome> reported_anova,
                                     const ReportOptions& options);

ReportBundle render_bundle(const CohortResult& result, const ReportOptions& options = {});

/// Each artifact goes to a temporary file first and is renamed into place.
void write_bundle(const ReportBundle& bundle, const std::filesystem::path& out_dir);

/// One record as JSON with fixed 4-decimal numbers.
std::string render_record_json(const MetricRecord& record, const EvalConfig& config);

std::string render_subgroup_json(const SubgroupReport& report);

void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace segeval
