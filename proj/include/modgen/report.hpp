#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "modgen/bench.hpp"

// Report emission: RFC-4180 CSV files plus a JSON document that parses back
// into the same ComparisonReport. Averages are printed with two decimals.

namespace modgen {

inline std::string csvEscape(const std::string& field) {
  bool needsQuotes = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needsQuotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

inline std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// ---------------------------------------------------------------------------
// CSV emitters
// ---------------------------------------------------------------------------

inline std::string comparisonCsv(const ComparisonReport& report) {
  std::string out =
      "file,class,method,branches,strictCovered,strictPct,emoteCovered,emotePct,"
      "deltaPct\n";
  for (const auto& row : report.rows) {
    out += csvEscape(row.target.file) + "," + csvEscape(row.target.className) + "," +
           csvEscape(row.target.method) + "," + std::to_string(row.branchTotal) + "," +
           fmt2(row.strictCovered) + "," + fmt2(row.strictPct) + "," +
           fmt2(row.emoteCovered) + "," + fmt2(row.emotePct) + "," +
           fmt2(row.deltaPct) + "\n";
  }
  return out;
}

inline std::string aggregateCsvRow(const FileAggregate& agg) {
  return csvEscape(agg.file) + "," + std::to_string(agg.branchTotal) + "," +
         fmt2(agg.strictCovered) + "," + fmt2(agg.strictPct) + "," +
         fmt2(agg.emoteCovered) + "," + fmt2(agg.emotePct) + "," + fmt2(agg.deltaPct) +
         "\n";
}

inline std::string summaryCsv(const ComparisonReport& report) {
  std::string out =
      "file,branches,strictCovered,strictPct,emoteCovered,emotePct,deltaPct\n";
  for (const auto& agg : report.files) out += aggregateCsvRow(agg);
  out += aggregateCsvRow(report.total);
  return out;
}

inline std::string timelineCsv(const ComparisonReport& report) {
  std::string out = "tSeconds,mode,meanCoveragePct\n";
  for (const auto& p : report.timeline)
    out += std::to_string(p.tSeconds) + "," + csvEscape(p.mode) + "," +
           fmt2(p.meanCoveragePct) + "\n";
  return out;
}

inline std::string heatmapCsv(const ComparisonReport& report) {
  std::string out = "strictBin,emoteBin,count\n";
  for (const auto& cell : report.heatmap)
    out += std::to_string(cell.strictBin) + "," + std::to_string(cell.emoteBin) + "," +
           std::to_string(cell.count) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// JSON round trip
// ---------------------------------------------------------------------------

inline nlohmann::json toJson(const TimelineSample& s) {
  return {{"tSeconds", s.tSeconds},
          {"coveredCount", s.coveredCount},
          {"coveragePct", s.coveragePct}};
}

inline nlohmann::json toJson(const RunRecord& r) {
  nlohmann::json timeline = nlohmann::json::array();
  for (const auto& s : r.timeline) timeline.push_back(toJson(s));
  return {{"file", r.target.file},
          {"class", r.target.className},
          {"method", r.target.method},
          {"mode", modeName(r.mode)},
          {"seed", r.seed},
          {"budgetSeconds", r.budgetSeconds},
          {"branchTotal", r.branchTotal},
          {"branchCovered", r.branchCovered},
          {"coveragePct", r.coveragePct},
          {"evaluations", r.evaluations},
          {"generations", r.generations},
          {"saturated", r.saturated},
          {"note", r.note},
          {"timeline", timeline}};
}

inline nlohmann::json toJson(const TargetComparison& row) {
  return {{"file", row.target.file},
          {"class", row.target.className},
          {"method", row.target.method},
          {"branches", row.branchTotal},
          {"strictCovered", row.strictCovered},
          {"strictPct", row.strictPct},
          {"emoteCovered", row.emoteCovered},
          {"emotePct", row.emotePct},
          {"deltaPct", row.deltaPct}};
}

inline nlohmann::json toJson(const FileAggregate& agg) {
  return {{"file", agg.file},
          {"branches", agg.branchTotal},
          {"strictCovered", agg.strictCovered},
          {"strictPct", agg.strictPct},
          {"emoteCovered", agg.emoteCovered},
          {"emotePct", agg.emotePct},
          {"deltaPct", agg.deltaPct}};
}

inline nlohmann::json toJson(const ComparisonReport& report) {
  nlohmann::json doc;
  doc["budgetSeconds"] = report.budgetSeconds;
  doc["seeds"] = report.seeds;
  doc["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) doc["rows"].push_back(toJson(row));
  doc["files"] = nlohmann::json::array();
  for (const auto& agg : report.files) doc["files"].push_back(toJson(agg));
  doc["total"] = toJson(report.total);
  doc["heatmap"] = nlohmann::json::array();
  for (const auto& cell : report.heatmap)
    doc["heatmap"].push_back(
        {{"strictBin", cell.strictBin}, {"emoteBin", cell.emoteBin}, {"count", cell.count}});
  doc["timeline"] = nlohmann::json::array();
  for (const auto& p : report.timeline)
    doc["timeline"].push_back({{"tSeconds", p.tSeconds},
                               {"mode", p.mode},
                               {"meanCoveragePct", p.meanCoveragePct}});
  doc["runs"] = nlohmann::json::array();
  for (const auto& r : report.runs) doc["runs"].push_back(toJson(r));
  doc["failures"] = report.failures;
  return doc;
}

inline TimelineSample timelineSampleFromJson(const nlohmann::json& j) {
  TimelineSample s;
  s.tSeconds = j.value("tSeconds", 0.0);
  s.coveredCount = j.value("coveredCount", 0);
  s.coveragePct = j.value("coveragePct", 0.0);
  return s;
}

inline RunRecord runRecordFromJson(const nlohmann::json& j) {
  RunRecord r;
  r.target = {j.value("file", ""), j.value("class", ""), j.value("method", "")};
  if (auto mode = parseMode(j.value("mode", "strict"))) r.mode = *mode;
  r.seed = j.value("seed", std::uint64_t{1});
  r.budgetSeconds = j.value("budgetSeconds", 0.0);
  r.branchTotal = j.value("branchTotal", 0);
  r.branchCovered = j.value("branchCovered", 0);
  r.coveragePct = j.value("coveragePct", 0.0);
  r.evaluations = j.value("evaluations", 0LL);
  r.generations = j.value("generations", 0LL);
  r.saturated = j.value("saturated", false);
  r.note = j.value("note", "");
  if (j.contains("timeline"))
    for (const auto& s : j["timeline"]) r.timeline.push_back(timelineSampleFromJson(s));
  return r;
}

inline FileAggregate aggregateFromJson(const nlohmann::json& j) {
  FileAggregate agg;
  agg.file = j.value("file", "");
  agg.branchTotal = j.value("branches", 0);
  agg.strictCovered = j.value("strictCovered", 0.0);
  agg.strictPct = j.value("strictPct", 100.0);
  agg.emoteCovered = j.value("emoteCovered", 0.0);
  agg.emotePct = j.value("emotePct", 100.0);
  agg.deltaPct = j.value("deltaPct", 0.0);
  return agg;
}

inline ComparisonReport parseComparisonReport(const nlohmann::json& doc) {
  ComparisonReport report;
  report.budgetSeconds = doc.value("budgetSeconds", 0.0);
  if (doc.contains("seeds"))
    for (const auto& s : doc["seeds"]) report.seeds.push_back(s.get<std::uint64_t>());
  if (doc.contains("rows")) {
    for (const auto& j : doc["rows"]) {
      TargetComparison row;
      row.target = {j.value("file", ""), j.value("class", ""), j.value("method", "")};
      row.branchTotal = j.value("branches", 0);
      row.strictCovered = j.value("strictCovered", 0.0);
      row.strictPct = j.value("strictPct", 100.0);
      row.emoteCovered = j.value("emoteCovered", 0.0);
      row.emotePct = j.value("emotePct", 100.0);
      row.deltaPct = j.value("deltaPct", 0.0);
      report.rows.push_back(row);
    }
  }
  if (doc.contains("files"))
    for (const auto& j : doc["files"]) report.files.push_back(aggregateFromJson(j));
  if (doc.contains("total")) report.total = aggregateFromJson(doc["total"]);
  if (doc.contains("heatmap"))
    for (const auto& j : doc["heatmap"])
      report.heatmap.push_back(
          {j.value("strictBin", 0), j.value("emoteBin", 0), j.value("count", 0)});
  if (doc.contains("timeline"))
    for (const auto& j : doc["timeline"])
      report.timeline.push_back(
          {j.value("tSeconds", 0), j.value("mode", ""), j.value("meanCoveragePct", 0.0)});
  if (doc.contains("runs"))
    for (const auto& j : doc["runs"]) report.runs.push_back(runRecordFromJson(j));
  if (doc.contains("failures"))
    for (const auto& f : doc["failures"]) report.failures.push_back(f.get<std::string>());
  return report;
}

// ---------------------------------------------------------------------------
// File output
// ---------------------------------------------------------------------------

inline bool writeTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

// Writes comparison.csv, summary.csv, timeline.csv, heatmap.csv and
// report.json into dir. Returns the paths written, empty on I/O failure.
inline std::vector<std::string> emitReports(const std::filesystem::path& dir,
                                            const ComparisonReport& report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::vector<std::pair<std::string, std::string>> files = {
      {"comparison.csv", comparisonCsv(report)},
      {"summary.csv", summaryCsv(report)},
      {"timeline.csv", timelineCsv(report)},
      {"heatmap.csv", heatmapCsv(report)},
      {"report.json", toJson(report).dump(2) + "\n"},
  };
  std::vector<std::string> written;
  for (const auto& [name, text] : files) {
    std::filesystem::path path = dir / name;
    if (!writeTextFile(path, text)) return {};
    written.push_back(path.string());
  }
  return written;
}

}  // namespace modgen
