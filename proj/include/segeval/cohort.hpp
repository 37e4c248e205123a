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

/// \file cohort.hpp
/// Batch evaluation of a manifest of (subject, method, structure) cases and
/// the cohort-level aggregates: per-metric ANOVA across methods, left/right
/// volume table and field-strength subgroup comparison.

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "segeval/anova.hpp"
#include "segeval/error.hpp"
#include "segeval/overlap.hpp"
#include "segeval/surface.hpp"
#include "segeval/volume_io.hpp"

namespace segeval {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum class FieldStrength { T1_5, T3_0 };

std::string_view to_string(FieldStrength f) noexcept;
/// Accepts 1.5T, 1.5, 3T, 3.0T, 3 (case-insensitive). Empty → nullopt.
/// Throws InvalidArgument otherwise.
std::optional<FieldStrength> parse_field_strength(std::string_view text);

struct Structure {
  enum class Kind { LeftHippocampus, RightHippocampus, Other };
  Kind kind = Kind::LeftHippocampus;
  std::string other;

  std::string name() const;
  friend bool operator==(const Structure&, const Structure&) = default;
};

/// left_hippocampus|left|L, right_hippocampus|right|R, other:<text>.
/// Throws UnknownStructure.
Structure parse_structure(std::string_view text);

struct CaseSpec {
  std::string subject_id;
  std::string method;
  Structure structure;
  std::filesystem::path auto_path;
  std::filesystem::path manual_path;
  std::optional<FieldStrength> field_strength;
  std::optional<BinarizeRule> rule;  ///< falls back to EvalConfig::default_rule
  std::size_t row = 0;               ///< manifest line number
};

/// CSV (header subject,method,structure,auto,manual[,field_strength][,label])
/// or JSON lines with the same keys. Relative paths resolve against the
/// manifest's directory. Throws DuplicateCase, MalformedRow, UnknownStructure.
std::vector<CaseSpec> parse_manifest(const std::filesystem::path& path);
std::vector<CaseSpec> parse_manifest_text(std::string_view text,
                                          const std::filesystem::path& base_dir,
                                          bool json_lines);

enum class Pooling { Observation, SubjectMean };

std::string_view to_string(Pooling p) noexcept;
Pooling parse_pooling(std::string_view text);

struct EvalConfig {
  CoordinateSpace space = CoordinateSpace::Index;
  Connectivity connectivity = Connectivity::Six;
  VolumeUnit unit = VolumeUnit::Mm3;
  Pooling pooling = Pooling::Observation;
  BinarizeRule default_rule = BinarizeRule::nonzero();
  int threads = 0;  ///< 0: OpenMP default. Never affects results.
};

/// Result-affecting settings as "key=value;..." (threads excluded).
std::string canonical_config(const EvalConfig& config);
/// 16 hex digits, FNV-1a over canonical_config.
std::string config_hash(const EvalConfig& config);

enum class Metric {
  Hausdorff, Dice, Similarity, Precision, RMS, ASSD, MeanDistance, Sensitivity, RAVD
};
inline constexpr std::size_t kMetricCount = 9;
/// Column order of the per-case table.
inline constexpr std::array<Metric, kMetricCount> kMetricColumns{
    Metric::Hausdorff, Metric::Dice, Metric::Similarity, Metric::Precision, Metric::RMS,
    Metric::ASSD, Metric::MeanDistance, Metric::Sensitivity, Metric::RAVD};

std::string_view metric_name(Metric m) noexcept;
/// Throws UnknownMetric listing the valid names.
Metric parse_metric(std::string_view name);
/// Metrics sorted by name, the order of cohort aggregates.
std::array<Metric, kMetricCount> metrics_by_name();

struct MetricRecord {
  std::string subject;
  std::string method;
  std::string structure;
  std::optional<FieldStrength> field_strength;
  std::array<double, kMetricCount> values{};  ///< indexed as kMetricColumns
  double v_auto = 0.0;
  double v_manual = 0.0;
  CoordinateSpace space = CoordinateSpace::Index;
  bool ok = false;
  std::string error;  ///< "Code: detail" when !ok

  double value(Metric m) const noexcept { return values[static_cast<std::size_t>(m)]; }
};

/// Load, binarize, check and measure one case. Throws on any failure.
MetricRecord compute_case(const CaseSpec& spec, const EvalConfig& config);

/// compute_case with failures captured in `error` instead of thrown.
MetricRecord evaluate_case(const CaseSpec& spec, const EvalConfig& config);

struct AnovaOutcome {
  Metric metric = Metric::Dice;
  std::optional<AnovaTable> table;
  ErrorCode error_code = ErrorCode::DegenerateData;
  std::string error;  ///< set when !table
  std::size_t observations = 0;
};

/// Groups ok records by method (lexicographic). Throws TooFewGroups when the
/// records name fewer than two methods, InconsistentMethods when fewer than
/// two of them have usable data, and whatever one_way_anova throws.
AnovaTable anova_for_metric(std::span<const MetricRecord> records, Metric metric,
                            Pooling pooling);
/// Non-throwing wrapper used for cohort aggregates.
AnovaOutcome try_anova_for_metric(std::span<const MetricRecord> records, Metric metric,
                                  Pooling pooling);

struct VolumeSide {
  double v_auto = 0.0;
  double v_manual = 0.0;
  double normalized_difference = 0.0;
};

struct VolumeRow {
  std::string subject;
  std::string method;
  std::optional<VolumeSide> left, right;
};

/// One row per (subject, method) with a left or right hippocampus record.
std::vector<VolumeRow> volume_table(std::span<const MetricRecord> records);

struct SubgroupEntry {
  std::string method;
  Metric metric = Metric::Dice;
  GroupSummary t1_5;
  GroupSummary t3_0;
  double delta = 0.0;  ///< mean(3T) - mean(1.5T)
};

struct SubgroupReport {
  std::vector<SubgroupEntry> entries;  ///< methods lexicographic, metrics in column order
  std::size_t n_t1_5 = 0;              ///< distinct subjects tagged 1.5T
  std::size_t n_t3_0 = 0;
};

/// Throws EmptySubgroup naming the (method, field strength) with no ok case.
SubgroupReport subgroup_compare(std::span<const MetricRecord> records);

struct Provenance {
  std::string tool_version;
  std::string config_hash;
  std::string manifest_path;
  EvalConfig config;
  std::vector<std::string> notes;
};

struct CohortResult {
  std::vector<MetricRecord> records;  ///< manifest order
  std::vector<AnovaOutcome> anova;    ///< metrics_by_name order
  std::vector<VolumeRow> volumes;
  std::optional<SubgroupReport> subgroups;
  std::string subgroup_error;
  Provenance provenance;

  std::size_t ok_count() const noexcept;
};

/// Evaluates every case concurrently (config.threads workers), then folds the
/// aggregates sequentially. Throws AllCasesFailed.
CohortResult evaluate_cohort(std::span<const CaseSpec> cases, const EvalConfig& config,
                             const std::string& manifest_path = {});

/// Aggregates only, from already evaluated records.
CohortResult aggregate_records(std::vector<MetricRecord> records, const EvalConfig& config,
                               const std::string& manifest_path = {});

}  // namespace segeval
