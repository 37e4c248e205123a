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

#include "segeval/report.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "segeval/csv.hpp"

namespace segeval {

using ordered_json = nlohmann::ordered_json;

namespace {

const std::vector<std::string>& metrics_header() {
  static const std::vector<std::string> header = [] {
    std::vector<std::string> h{"subject", "method", "structure", "field_strength", "status"};
    for (const Metric m : kMetricColumns) h.emplace_back(metric_name(m));
    h.insert(h.end(), {"v_auto", "v_manual", "error"});
    return h;
  }();
  return header;
}

ordered_json config_json(const Provenance& p) {
  ordered_json j;
  j["tool_version"] = p.tool_version;
  j["config_hash"] = p.config_hash;
  j["space"] = to_string(p.config.space);
  j["connectivity"] = std::stoi(std::string(to_string(p.config.connectivity)));
  j["unit"] = to_string(p.config.unit);
  j["pooling"] = to_string(p.config.pooling);
  j["label"] = to_string(p.config.default_rule);
  return j;
}

std::string num(double v) { return csv::fixed(v, kCsvDecimals); }

// JSON number with a fixed number of decimals; NaN becomes null.
std::string json_fixed(double v) {
  if (!std::isfinite(v)) return "null";
  return csv::fixed(v, kCsvDecimals);
}

}  // namespace

std::string config_comment(const Provenance& p) {
  return "# segeval " + p.tool_version + " config_hash=" + p.config_hash +
         " space=" + std::string(to_string(p.config.space)) +
         " connectivity=" + std::string(to_string(p.config.connectivity)) +
         " unit=" + std::string(to_string(p.config.unit)) +
         " pooling=" + std::string(to_string(p.config.pooling)) +
         " label=" + to_string(p.config.default_rule) + "\n";
}

std::string render_metrics_csv(std::span<const MetricRecord> records, const Provenance& p) {
  std::string out = config_comment(p);
  out += csv::join(metrics_header()) + "\n";
  for (const auto& r : records) {
    std::vector<std::string> row{r.subject, r.method, r.structure,
                                 r.field_strength ? std::string(to_string(*r.field_strength)) : "",
                                 r.ok ? "ok" : "error"};
    for (const Metric m : kMetricColumns) row.push_back(r.ok ? num(r.value(m)) : "");
    row.push_back(r.ok ? num(r.v_auto) : "");
    row.push_back(r.ok ? num(r.v_manual) : "");
    row.push_back(r.error);
    out += csv::join(row) + "\n";
  }
  return out;
}

std::vector<MetricRecord> read_metrics_csv(std::string_view text) {
  const csv::Document doc = csv::parse(text);
  CoordinateSpace space = CoordinateSpace::Index;
  for (const auto& c : doc.comments)
    if (c.find("space=physical") != std::string::npos) space = CoordinateSpace::Physical;

  auto col = [&](std::string_view name) {
    const auto c = doc.column(name);
    if (!c) throw Error(ErrorCode::MalformedCsv, "metrics table lacks column '" + std::string(name) + "'");
    return *c;
  };
  const std::size_t cs = col("subject"), cm = col("method"), cst = col("structure"),
                    cstat = col("status");
  const auto cf = doc.column("field_strength");
  const auto cva = doc.column("v_auto");
  const auto cvm = doc.column("v_manual");
  const auto cerr = doc.column("error");
  std::array<std::size_t, kMetricCount> cmetric{};
  for (std::size_t i = 0; i < kMetricCount; ++i) cmetric[i] = col(metric_name(kMetricColumns[i]));

  std::vector<MetricRecord> out;
  for (const auto& row : doc.rows) {
    MetricRecord r;
    r.subject = row.fields[cs];
    r.method = row.fields[cm];
    r.structure = row.fields[cst];
    r.space = space;
    const std::string& status = row.fields[cstat];
    if (status != "ok" && status != "error")
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(row.line) + ": bad status '" + status + "'");
    r.ok = status == "ok";
    try {
      if (cf) r.field_strength = parse_field_strength(row.fields[*cf]);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(row.line) + ": " + e.what());
    }
    for (std::size_t i = 0; i < kMetricCount; ++i) {
      r.values[i] = csv::parse_real(row.fields[cmetric[i]]);
      if (r.ok && !std::isfinite(r.values[i]))
        throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(row.line) + ": ok row with missing " +
                                                 std::string(metric_name(kMetricColumns[i])));
    }
    r.v_auto = cva ? csv::parse_real(row.fields[*cva]) : std::nan("");
    r.v_manual = cvm ? csv::parse_real(row.fields[*cvm]) : std::nan("");
    if (cerr) r.error = row.fields[*cerr];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MetricRecord> read_metrics_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return read_metrics_csv(ss.str());
}

std::string render_anova_csv(std::span<const AnovaOutcome> outcomes, const Provenance& p) {
  std::string out = config_comment(p);
  for (const auto& o : outcomes)
    if (!o.table) out += "# " + std::string(metric_name(o.metric)) + " not computed: " + o.error + "\n";
  out += csv::join({"Measurement", "Source", "SS", "df", "MS", "F", "P-value", "SS_exact",
                    "MS_exact", "F_exact", "P_exact"}) + "\n";
  for (const auto& o : outcomes) {
    if (!o.table) continue;
    const AnovaTable& t = *o.table;
    const std::string name(metric_name(o.metric));
    out += csv::join({name, "Columns", num(t.ss_between), std::to_string(t.df_between),
                      num(t.ms_between), num(t.f), csv::scientific(t.p, kPValueDecimals),
                      csv::exact(t.ss_between), csv::exact(t.ms_between), csv::exact(t.f),
                      csv::exact(t.p)}) + "\n";
    out += csv::join({name, "Error", num(t.ss_within), std::to_string(t.df_within),
                      num(t.ms_within), "-", "-", csv::exact(t.ss_within),
                      csv::exact(t.ms_within), "", ""}) + "\n";
    out += csv::join({name, "Total", num(t.ss_total), std::to_string(t.df_total), "-", "-",
                      "-", csv::exact(t.ss_total), "", "", ""}) + "\n";
  }
  return out;
}

std::string render_volumes_csv(std::span<const VolumeRow> rows, const Provenance& p) {
  std::string out = config_comment(p);
  out += "# normalized_difference=" + std::string(kNormalizedDifferenceFormula) + "\n";
  out += csv::join({"subject", "method", "left_auto", "left_manual", "left_normalized_difference",
                    "right_auto", "right_manual", "right_normalized_difference"}) + "\n";
  for (const auto& r : rows) {
    std::vector<std::string> row{r.subject, r.method};
    for (const auto* side : {&r.left, &r.right}) {
      if (*side) {
        row.push_back(num((*side)->v_auto));
        row.push_back(num((*side)->v_manual));
        row.push_back(num((*side)->normalized_difference));
      } else {
        row.insert(row.end(), {"", "", ""});
      }
    }
    out += csv::join(row) + "\n";
  }
  return out;
}

std::string render_boxplot_json(std::span<const MetricRecord> records, const Provenance& p) {
  ordered_json j;
  j["config"] = config_json(p);
  std::set<std::string> methods;
  for (const auto& r : records)
    if (r.ok) methods.insert(r.method);
  ordered_json metrics = ordered_json::array();
  for (const Metric m : kMetricColumns) {
    ordered_json per_method = ordered_json::array();
    for (const auto& method : methods) {
      std::vector<double> values;
      for (const auto& r : records)
        if (r.ok && r.method == method) values.push_back(r.value(m));
      const GroupSummary s = group_summary(values);
      ordered_json e;
      e["method"] = method;
      e["n"] = s.n;
      e["mean"] = s.mean;
      e["min"] = s.min;
      e["q1"] = s.q1;
      e["median"] = s.median;
      e["q3"] = s.q3;
      e["max"] = s.max;
      per_method.push_back(std::move(e));
    }
    metrics.push_back({{"metric", metric_name(m)}, {"methods", std::move(per_method)}});
  }
  j["metrics"] = std::move(metrics);
  return j.dump(2) + "\n";
}

std::string render_scatter_json(std::span<const MetricRecord> records, const Provenance& p) {
  ordered_json j;
  j["config"] = config_json(p);
  std::set<std::string> methods;
  for (const auto& r : records)
    if (r.ok) methods.insert(r.method);
  ordered_json series = ordered_json::array();
  for (const Metric m : kMetricColumns) {
    for (const auto& method : methods) {
      ordered_json points = ordered_json::array();
      for (const auto& r : records)
        if (r.ok && r.method == method)
          points.push_back({{"subject", r.subject}, {"structure", r.structure}, {"value", r.value(m)}});
      series.push_back({{"metric", metric_name(m)}, {"method", method}, {"points", std::move(points)}});
    }
  }
  j["series"] = std::move(series);
  return j.dump(2) + "\n";
}

std::string render_run_manifest_json(const CohortResult& result,
                                     std::span<const AnovaOutcome> reported_anova,
                                     const ReportOptions& options) {
  const Provenance& p = result.provenance;
  ordered_json j;
  j["config"] = config_json(p);
  j["manifest_path"] = p.manifest_path;
  if (options.timestamp) j["generated_at"] = *options.timestamp;
  j["case_count"] = result.records.size();
  j["ok_count"] = result.ok_count();
  j["error_count"] = result.records.size() - result.ok_count();
  ordered_json errors = ordered_json::array();
  for (const auto& r : result.records)
    if (!r.ok)
      errors.push_back({{"subject", r.subject}, {"method", r.method}, {"structure", r.structure},
                        {"error", r.error}});
  j["case_errors"] = std::move(errors);
  ordered_json anova = ordered_json::array();
  for (const auto& o : reported_anova) {
    ordered_json e;
    e["metric"] = metric_name(o.metric);
    e["computed"] = o.table.has_value();
    if (o.table) {
      e["observations"] = o.observations;
    } else {
      e["error"] = o.error;
    }
    anova.push_back(std::move(e));
  }
  j["anova"] = std::move(anova);
  j["anova_source"] = "metrics.csv values as written (4 decimals)";
  if (!result.subgroup_error.empty()) j["subgroup_error"] = result.subgroup_error;
  j["notes"] = p.notes;
  j["artifacts"] = {"metrics.csv", "volumes.csv", "anova.csv", "boxplot.json", "scatter.json"};
  return j.dump(2) + "\n";
}

ReportBundle render_bundle(const CohortResult& result, const ReportOptions& options) {
  const Provenance& p = result.provenance;
  ReportBundle b;
  b.metrics_csv = render_metrics_csv(result.records, p);
  const std::vector<MetricRecord> reported = read_metrics_csv(b.metrics_csv);
  std::vector<AnovaOutcome> reported_anova;
  for (const Metric m : metrics_by_name())
    reported_anova.push_back(try_anova_for_metric(reported, m, p.config.pooling));
  b.anova_csv = render_anova_csv(reported_anova, p);
  b.volumes_csv = render_volumes_csv(result.volumes, p);
  b.boxplot_json = render_boxplot_json(result.records, p);
  b.scatter_json = render_scatter_json(result.records, p);
  b.run_manifest_json = render_run_manifest_json(result, reported_anova, options);
  return b;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

void write_bundle(const ReportBundle& bundle, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
  write_file_atomic(out_dir / "metrics.csv", bundle.metrics_csv);
  write_file_atomic(out_dir / "volumes.csv", bundle.volumes_csv);
  write_file_atomic(out_dir / "anova.csv", bundle.anova_csv);
  write_file_atomic(out_dir / "boxplot.json", bundle.boxplot_json);
  write_file_atomic(out_dir / "scatter.json", bundle.scatter_json);
  write_file_atomic(out_dir / "run_manifest.json", bundle.run_manifest_json);
}

std::string render_record_json(const MetricRecord& r, const EvalConfig& config) {
  auto str = [](const std::string& s) { return nlohmann::json(s).dump(); };
  std::string out = "{\n";
  out += "  \"subject\": " + str(r.subject) + ",\n";
  out += "  \"method\": " + str(r.method) + ",\n";
  out += "  \"structure\": " + str(r.structure) + ",\n";
  out += "  \"status\": " + str(r.ok ? "ok" : "error") + ",\n";
  if (!r.ok) out += "  \"error\": " + str(r.error) + ",\n";
  out += "  \"space\": " + str(std::string(to_string(config.space))) + ",\n";
  out += "  \"connectivity\": " + std::string(to_string(config.connectivity)) + ",\n";
  out += "  \"unit\": " + str(std::string(to_string(config.unit))) + ",\n";
  out += "  \"config_hash\": " + str(config_hash(config)) + ",\n";
  for (const Metric m : kMetricColumns)
    out += "  " + str(std::string(metric_name(m))) + ": " + json_fixed(r.value(m)) + ",\n";
  out += "  \"v_auto\": " + json_fixed(r.v_auto) + ",\n";
  out += "  \"v_manual\": " + json_fixed(r.v_manual) + "\n";
  out += "}\n";
  return out;
}

std::string render_subgroup_json(const SubgroupReport& report) {
  auto summary = [](const GroupSummary& s) {
    ordered_json j;
    j["n"] = s.n;
    j["mean"] = s.mean;
    j["sd"] = s.sd;
    j["sd_defined"] = s.sd_defined;
    j["min"] = s.min;
    j["q1"] = s.q1;
    j["median"] = s.median;
    j["q3"] = s.q3;
    j["max"] = s.max;
    return j;
  };
  ordered_json j;
  j["partition"] = "field_strength";
  j["subjects"] = {{"1.5T", report.n_t1_5}, {"3T", report.n_t3_0}};
  ordered_json entries = ordered_json::array();
  for (const auto& e : report.entries) {
    ordered_json x;
    x["method"] = e.method;
    x["metric"] = metric_name(e.metric);
    x["mean_1.5T"] = e.t1_5.mean;
    x["mean_3T"] = e.t3_0.mean;
    x["delta_3T_minus_1.5T"] = e.delta;
    x["summary_1.5T"] = summary(e.t1_5);
    x["summary_3T"] = summary(e.t3_0);
    entries.push_back(std::move(x));
  }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

}  // namespace segeval
