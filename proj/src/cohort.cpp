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

#include "segeval/cohort.hpp"

#include <omp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "segeval/csv.hpp"

namespace segeval {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view to_string(FieldStrength f) noexcept {
  return f == FieldStrength::T1_5 ? "1.5T" : "3T";
}

std::optional<FieldStrength> parse_field_strength(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t.empty()) return std::nullopt;
  if (t == "1.5t" || t == "1.5") return FieldStrength::T1_5;
  if (t == "3t" || t == "3.0t" || t == "3" || t == "3.0") return FieldStrength::T3_0;
  throw Error(ErrorCode::InvalidArgument,
              "unknown field strength '" + std::string(text) + "' (expected 1.5T or 3T)");
}

std::string Structure::name() const {
  switch (kind) {
    case Kind::LeftHippocampus: return "left_hippocampus";
    case Kind::RightHippocampus: return "right_hippocampus";
    case Kind::Other: return "other:" + other;
  }
  return {};
}

Structure parse_structure(std::string_view text) {
  const std::string t = trim(text);
  const std::string l = lower(t);
  if (l == "left_hippocampus" || l == "left" || l == "l")
    return {Structure::Kind::LeftHippocampus, {}};
  if (l == "right_hippocampus" || l == "right" || l == "r")
    return {Structure::Kind::RightHippocampus, {}};
  if (l.starts_with("other:") && t.size() > 6) return {Structure::Kind::Other, t.substr(6)};
  throw Error(ErrorCode::UnknownStructure, "unknown structure '" + t + "'");
}

std::string_view to_string(Pooling p) noexcept {
  return p == Pooling::Observation ? "observation" : "subject";
}

Pooling parse_pooling(std::string_view text) {
  if (text == "observation") return Pooling::Observation;
  if (text == "subject") return Pooling::SubjectMean;
  throw Error(ErrorCode::InvalidArgument, "pooling must be observation or subject");
}

// ---------------------------------------------------------------- manifest

namespace {

struct RawCase {
  std::string subject, method, structure, auto_path, manual_path, field_strength, label;
  std::size_t row = 0;
};

CaseSpec to_case(const RawCase& raw, const std::filesystem::path& base_dir) {
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::MalformedRow, "row " + std::to_string(raw.row) + ": " + why);
  };
  CaseSpec spec;
  spec.row = raw.row;
  spec.subject_id = trim(raw.subject);
  spec.method = trim(raw.method);
  if (spec.subject_id.empty()) throw fail("empty subject");
  if (spec.method.empty()) throw fail("empty method");
  try {
    spec.structure = parse_structure(raw.structure);
  } catch (const Error& e) {
    throw Error(ErrorCode::UnknownStructure, "row " + std::to_string(raw.row) + ": " + e.what());
  }
  const std::string a = trim(raw.auto_path), m = trim(raw.manual_path);
  if (a.empty() || m.empty()) throw fail("empty volume path");
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path = std::filesystem::u8path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  spec.auto_path = resolve(a);
  spec.manual_path = resolve(m);
  try {
    spec.field_strength = parse_field_strength(raw.field_strength);
    const std::string label = trim(raw.label);
    if (!label.empty()) spec.rule = parse_binarize_rule(label);
  } catch (const Error& e) {
    throw fail(e.what());
  }
  return spec;
}

std::vector<RawCase> read_csv_manifest(std::string_view text) {
  csv::Document doc;
  try {
    doc = csv::parse(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedRow, e.what());
  }
  for (auto& h : doc.header) h = lower(trim(h));
  auto required = [&](std::string_view name) {
    const auto c = doc.column(name);
    if (!c) throw Error(ErrorCode::MalformedRow, "manifest header lacks '" + std::string(name) + "'");
    return *c;
  };
  const std::size_t cs = required("subject"), cm = required("method"),
                    cst = required("structure"), ca = required("auto"),
                    cman = required("manual");
  const auto cf = doc.column("field_strength");
  const auto cl = doc.column("label");
  std::vector<RawCase> out;
  for (const auto& row : doc.rows) {
    RawCase r;
    r.row = row.line;
    r.subject = row.fields[cs];
    r.method = row.fields[cm];
    r.structure = row.fields[cst];
    r.auto_path = row.fields[ca];
    r.manual_path = row.fields[cman];
    if (cf) r.field_strength = row.fields[*cf];
    if (cl) r.label = row.fields[*cl];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RawCase> read_jsonl_manifest(std::string_view text) {
  std::vector<RawCase> out;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedRow, "row " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::MalformedRow, "row " + std::to_string(line_no) + ": not an object");
    auto field = [&](const char* key, bool required) -> std::string {
      if (!j.contains(key) || j[key].is_null()) {
        if (required)
          throw Error(ErrorCode::MalformedRow,
                      "row " + std::to_string(line_no) + ": missing '" + key + "'");
        return {};
      }
      const auto& v = j[key];
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number()) return v.dump();
      throw Error(ErrorCode::MalformedRow, "row " + std::to_string(line_no) + ": bad '" + key + "'");
    };
    RawCase r;
    r.row = line_no;
    r.subject = field("subject", true);
    r.method = field("method", true);
    r.structure = field("structure", true);
    r.auto_path = field("auto", true);
    r.manual_path = field("manual", true);
    r.field_strength = field("field_strength", false);
    r.label = field("label", false);
    out.push_back(std::move(r));
    if (end == text.size()) break;
  }
  return out;
}

}  // namespace

std::vector<CaseSpec> parse_manifest_text(std::string_view text,
                                          const std::filesystem::path& base_dir,
                                          bool json_lines) {
  const auto raw = json_lines ? read_jsonl_manifest(text) : read_csv_manifest(text);
  std::vector<CaseSpec> cases;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> seen;
  for (const auto& r : raw) {
    CaseSpec spec = to_case(r, base_dir);
    const auto key = std::make_tuple(spec.subject_id, spec.method, spec.structure.name());
    const auto [it, inserted] = seen.emplace(key, spec.row);
    if (!inserted)
      throw Error(ErrorCode::DuplicateCase,
                  "(" + spec.subject_id + ", " + spec.method + ", " + spec.structure.name() +
                      ") appears in rows " + std::to_string(it->second) + " and " +
                      std::to_string(spec.row));
    cases.push_back(std::move(spec));
  }
  return cases;
}

std::vector<CaseSpec> parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const std::string ext = lower(path.extension().string());
  bool json_lines = ext == ".jsonl" || ext == ".ndjson";
  if (!json_lines && ext != ".csv") {
    const auto first = text.find_first_not_of(" \t\r\n");
    json_lines = first != std::string::npos && text[first] == '{';
  }
  return parse_manifest_text(text, path.parent_path(), json_lines);
}

// ---------------------------------------------------------------- config

std::string canonical_config(const EvalConfig& c) {
  std::string out = "space=" + std::string(to_string(c.space));
  out += ";connectivity=" + std::string(to_string(c.connectivity));
  out += ";unit=" + std::string(to_string(c.unit));
  out += ";pooling=" + std::string(to_string(c.pooling));
  out += ";label=" + to_string(c.default_rule);
  out += ";version=" + std::string(kToolVersion);
  return out;
}

std::string config_hash(const EvalConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : canonical_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
  return out;
}

// ---------------------------------------------------------------- metrics

std::string_view metric_name(Metric m) noexcept {
  switch (m) {
    case Metric::Hausdorff: return "Hausdorff";
    case Metric::Dice: return "Dice";
    case Metric::Similarity: return "Similarity";
    case Metric::Precision: return "Precision";
    case Metric::RMS: return "RMS";
    case Metric::ASSD: return "ASSD";
    case Metric::MeanDistance: return "MeanDistance";
    case Metric::Sensitivity: return "Sensitivity";
    case Metric::RAVD: return "RAVD";
  }
  return {};
}

Metric parse_metric(std::string_view name) {
  for (const Metric m : kMetricColumns)
    if (lower(metric_name(m)) == lower(name)) return m;
  std::string valid;
  for (const Metric m : kMetricColumns) {
    if (!valid.empty()) valid += ", ";
    valid += metric_name(m);
  }
  throw Error(ErrorCode::UnknownMetric,
              "'" + std::string(name) + "' is not a metric; valid names: " + valid);
}

std::array<Metric, kMetricCount> metrics_by_name() {
  auto out = kMetricColumns;
  std::sort(out.begin(), out.end(),
            [](Metric a, Metric b) { return metric_name(a) < metric_name(b); });
  return out;
}

namespace {

MetricRecord blank_record(const CaseSpec& spec, const EvalConfig& config) {
  MetricRecord rec;
  rec.subject = spec.subject_id;
  rec.method = spec.method;
  rec.structure = spec.structure.name();
  rec.field_strength = spec.field_strength;
  rec.space = config.space;
  rec.values.fill(std::nan(""));
  rec.v_auto = rec.v_manual = std::nan("");
  return rec;
}

}  // namespace

MetricRecord compute_case(const CaseSpec& spec, const EvalConfig& config) {
  MetricRecord rec = blank_record(spec, config);
  const BinarizeRule rule = spec.rule.value_or(config.default_rule);
  const BinaryMask a = binarize(load_volume(spec.auto_path), rule);
  const BinaryMask m = binarize(load_volume(spec.manual_path), rule);
  const ConfusionCounts counts = confusion_counts(a, m);
  const VolumePair vols{volume(a, config.unit), volume(m, config.unit), config.unit};
  const OverlapResult ov = overlap_metrics(counts, vols);
  const SurfaceDistanceResult sd =
      compare_surfaces(a, m, SurfaceOptions{config.space, config.connectivity});
  auto set = [&](Metric k, double v) { rec.values[static_cast<std::size_t>(k)] = v; };
  set(Metric::Hausdorff, sd.hausdorff);
  set(Metric::Dice, ov.dice);
  set(Metric::Similarity, ov.similarity);
  set(Metric::Precision, ov.precision);
  set(Metric::RMS, sd.rms);
  set(Metric::ASSD, sd.assd);
  set(Metric::MeanDistance, sd.mean_distance);
  set(Metric::Sensitivity, ov.sensitivity);
  set(Metric::RAVD, ov.ravd);
  rec.v_auto = vols.v_auto;
  rec.v_manual = vols.v_manual;
  rec.ok = true;
  return rec;
}

MetricRecord evaluate_case(const CaseSpec& spec, const EvalConfig& config) {
  try {
    return compute_case(spec, config);
  } catch (const Error& e) {
    MetricRecord rec = blank_record(spec, config);
    rec.error = e.describe();
    return rec;
  } catch (const std::exception& e) {
    MetricRecord rec = blank_record(spec, config);
    rec.error = std::string("InternalError: ") + e.what();
    return rec;
  }
}

// ---------------------------------------------------------------- aggregates

AnovaTable anova_for_metric(std::span<const MetricRecord> records, Metric metric,
                            Pooling pooling) {
  std::set<std::string> methods;
  for (const auto& r : records) methods.insert(r.method);
  if (methods.size() < 2)
    throw Error(ErrorCode::TooFewGroups, "records name " + std::to_string(methods.size()) +
                                             " method(s); ANOVA needs at least two");

  std::map<std::string, std::vector<double>> by_method;
  if (pooling == Pooling::Observation) {
    for (const auto& r : records)
      if (r.ok) by_method[r.method].push_back(r.value(metric));
  } else {
    std::set<std::string> excluded;
    for (const auto& r : records)
      if (!r.ok) excluded.insert(r.subject);
    std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> acc;
    for (const auto& r : records) {
      if (!r.ok || excluded.count(r.subject)) continue;
      auto& slot = acc[{r.method, r.subject}];
      slot.first += r.value(metric);
      slot.second += 1;
    }
    for (const auto& [key, slot] : acc)
      by_method[key.first].push_back(slot.first / static_cast<double>(slot.second));
  }
  if (by_method.size() < 2)
    throw Error(ErrorCode::InconsistentMethods,
                std::string(metric_name(metric)) + ": only " + std::to_string(by_method.size()) +
                    " method(s) have usable data");
  std::vector<GroupSample> groups;
  for (auto& [method, values] : by_method) groups.push_back({method, std::move(values)});
  return one_way_anova(groups);
}

AnovaOutcome try_anova_for_metric(std::span<const MetricRecord> records, Metric metric,
                                  Pooling pooling) {
  AnovaOutcome out;
  out.metric = metric;
  try {
    out.table = anova_for_metric(records, metric, pooling);
    out.observations = static_cast<std::size_t>(out.table->df_total + 1);
  } catch (const Error& e) {
    out.error_code = e.code();
    out.error = e.describe();
  }
  return out;
}

std::vector<VolumeRow> volume_table(std::span<const MetricRecord> records) {
  std::map<std::pair<std::string, std::string>, VolumeRow> rows;
  const std::string left = Structure{Structure::Kind::LeftHippocampus, {}}.name();
  const std::string right = Structure{Structure::Kind::RightHippocampus, {}}.name();
  for (const auto& r : records) {
    if (!r.ok || (r.structure != left && r.structure != right)) continue;
    auto& row = rows[{r.subject, r.method}];
    row.subject = r.subject;
    row.method = r.method;
    const VolumeSide side{r.v_auto, r.v_manual,
                          normalized_volume_difference({r.v_auto, r.v_manual, VolumeUnit::Mm3})};
    (r.structure == left ? row.left : row.right) = side;
  }
  std::vector<VolumeRow> out;
  for (auto& [key, row] : rows) out.push_back(std::move(row));
  return out;
}

SubgroupReport subgroup_compare(std::span<const MetricRecord> records) {
  std::set<std::string> methods;
  std::set<std::string> subj15, subj30;
  for (const auto& r : records) {
    if (!r.ok) continue;
    methods.insert(r.method);
    if (r.field_strength == FieldStrength::T1_5) subj15.insert(r.subject);
    if (r.field_strength == FieldStrength::T3_0) subj30.insert(r.subject);
  }
  if (methods.empty()) throw Error(ErrorCode::EmptySubgroup, "no successfully evaluated cases");
  SubgroupReport report;
  report.n_t1_5 = subj15.size();
  report.n_t3_0 = subj30.size();
  for (const auto& method : methods) {
    for (const Metric metric : kMetricColumns) {
      std::vector<double> v15, v30;
      for (const auto& r : records) {
        if (!r.ok || r.method != method || !r.field_strength) continue;
        (*r.field_strength == FieldStrength::T1_5 ? v15 : v30).push_back(r.value(metric));
      }
      if (v15.empty())
        throw Error(ErrorCode::EmptySubgroup, "(" + method + ", 1.5T) has no cases");
      if (v30.empty())
        throw Error(ErrorCode::EmptySubgroup, "(" + method + ", 3T) has no cases");
      SubgroupEntry e;
      e.method = method;
      e.metric = metric;
      e.t1_5 = group_summary(v15);
      e.t3_0 = group_summary(v30);
      e.delta = e.t3_0.mean - e.t1_5.mean;
      report.entries.push_back(std::move(e));
    }
  }
  return report;
}

std::size_t CohortResult::ok_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const MetricRecord& r) { return r.ok; }));
}

CohortResult aggregate_records(std::vector<MetricRecord> records, const EvalConfig& config,
                               const std::string& manifest_path) {
  CohortResult result;
  result.records = std::move(records);
  result.provenance = {std::string(kToolVersion), config_hash(config), manifest_path, config, {}};
  result.provenance.notes.push_back("mean_distance=" + std::string(kMeanDistanceDefinition));
  result.provenance.notes.push_back("normalized_volume_difference=" +
                                    std::string(kNormalizedDifferenceFormula));
  if (config.pooling == Pooling::SubjectMean)
    result.provenance.notes.push_back(
        "subject pooling excludes subjects with any errored case");
  if (result.ok_count() == 0)
    throw Error(ErrorCode::AllCasesFailed,
                "all " + std::to_string(result.records.size()) + " cases failed");
  for (const Metric m : metrics_by_name())
    result.anova.push_back(try_anova_for_metric(result.records, m, config.pooling));
  result.volumes = volume_table(result.records);
  try {
    result.subgroups = subgroup_compare(result.records);
  } catch (const Error& e) {
    result.subgroup_error = e.describe();
  }
  return result;
}

CohortResult evaluate_cohort(std::span<const CaseSpec> cases, const EvalConfig& config,
                             const std::string& manifest_path) {
  if (cases.empty()) throw Error(ErrorCode::InvalidArgument, "empty cohort");
  std::vector<MetricRecord> records(cases.size());
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
  const auto n = static_cast<std::int64_t>(cases.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i)
    records[static_cast<std::size_t>(i)] = evaluate_case(cases[static_cast<std::size_t>(i)], config);
  return aggregate_records(std::move(records), config, manifest_path);
}

}  // namespace segeval
