#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "modgen/corpus.hpp"
#include "modgen/search.hpp"

// Benchmark harness: single-target runs and the STRICT-vs-EMOTE comparison
// over a corpus. Runs are dispatched to a worker pool and reassembled in a
// deterministic order, so reports are reproducible for a fixed seed list
// regardless of worker count.

namespace modgen {

struct RunRecord {
  TargetRef target;
  ClusterMode mode = ClusterMode::Strict;
  std::uint64_t seed = 1;
  double budgetSeconds = 0.0;
  int branchTotal = 0;
  int branchCovered = 0;
  double coveragePct = 100.0;
  long long evaluations = 0;
  long long generations = 0;
  bool saturated = false;
  std::string note;
  std::vector<TimelineSample> timeline;
};

inline RunRecord runTarget(const CheckedProgram& prog, const TargetRef& target,
                           ClusterMode mode, const SearchConfig& base) {
  SearchConfig config = base;
  config.mode = mode;
  RunRecord rec;
  rec.target = target;
  rec.mode = mode;
  rec.seed = config.seed;
  rec.budgetSeconds = config.budgetSeconds;
  rec.branchTotal = targetBranchTotal(prog, target);

  SearchResult res = evolve(prog, target.className, target.method, config);
  rec.branchCovered = res.ledger.coveredCount();
  rec.coveragePct = res.ledger.coveragePct();
  rec.evaluations = res.evaluations;
  rec.generations = res.generations;
  rec.saturated = res.saturated;
  rec.timeline = res.timeline;
  if (!res.diagnostics.empty()) rec.note = res.diagnostics.front();
  return rec;
}

// ---------------------------------------------------------------------------
// Comparison report model
// ---------------------------------------------------------------------------

struct TargetComparison {
  TargetRef target;
  int branchTotal = 0;
  double strictCovered = 0.0;  // averaged over seeds
  double emoteCovered = 0.0;
  double strictPct = 100.0;
  double emotePct = 100.0;
  double deltaPct = 0.0;  // percentage points, EMOTE minus STRICT
};

struct FileAggregate {
  std::string file;  // "TOTAL" for the pooled row
  int branchTotal = 0;
  double strictCovered = 0.0;
  double emoteCovered = 0.0;
  double strictPct = 100.0;
  double emotePct = 100.0;
  double deltaPct = 0.0;
};

struct HeatmapCell {
  int strictBin = 0;
  int emoteBin = 0;
  int count = 0;
};

struct TimelinePoint {
  int tSeconds = 0;
  std::string mode;
  double meanCoveragePct = 0.0;
};

struct ComparisonReport {
  double budgetSeconds = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<TargetComparison> rows;   // sorted by (file, class, method)
  std::vector<FileAggregate> files;     // per-file pooled aggregates
  FileAggregate total;                  // pooled over everything
  std::vector<HeatmapCell> heatmap;     // nonzero cells, sorted
  std::vector<TimelinePoint> timeline;  // per-second mean coverage per mode
  std::vector<RunRecord> runs;          // every (target, mode, seed) run
  std::vector<std::string> failures;    // flagged partial failures
};

// Coverage bin for the heatmap: 0 only for exactly 0%, 11 only for exactly
// 100%, otherwise ceil(pct/10) in 1..10.
inline int coverageBin(double pct) {
  if (pct <= 0.0) return 0;
  if (pct >= 100.0) return 11;
  int bin = static_cast<int>(std::ceil(pct / 10.0));
  return std::clamp(bin, 1, 10);
}

// Step-function value of a run's timeline at integer second t.
inline double timelineValueAt(const std::vector<TimelineSample>& samples, double t) {
  double value = 0.0;
  for (const auto& s : samples) {
    if (s.tSeconds <= t) value = s.coveragePct;
    else break;
  }
  return value;
}

inline ComparisonReport compareModes(const std::vector<CorpusEntry>& entries,
                                     const std::vector<std::uint64_t>& seeds,
                                     const SearchConfig& base, int jobs) {
  struct Task {
    const CorpusEntry* entry;
    TargetRef target;
    ClusterMode mode;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& entry : entries)
    for (const auto& target : entry.targets)
      for (ClusterMode mode : {ClusterMode::Strict, ClusterMode::Emote})
        for (std::uint64_t seed : seeds)
          tasks.push_back({&entry, target, mode, seed});

  std::vector<RunRecord> runs(tasks.size());
  std::atomic<size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      size_t i = cursor.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& t = tasks[i];
      SearchConfig config = base;
      config.seed = t.seed;
      runs[i] = runTarget(t.entry->checked, t.target, t.mode, config);
    }
  };
  int width = std::max(1, jobs);
  if (width == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < width; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::stable_sort(runs.begin(), runs.end(), [](const RunRecord& a, const RunRecord& b) {
    if (!(a.target == b.target)) return a.target < b.target;
    if (a.mode != b.mode) return static_cast<int>(a.mode) < static_cast<int>(b.mode);
    return a.seed < b.seed;
  });

  ComparisonReport report;
  report.budgetSeconds = base.budgetSeconds;
  report.seeds = seeds;
  report.runs = runs;
  for (const auto& r : runs) {
    if (r.saturated)
      report.failures.push_back(r.target.qualified() + " " + modeName(r.mode) + " seed " +
                                std::to_string(r.seed) + ": " +
                                (r.note.empty() ? "saturated" : r.note));
  }

  // Per-target rows: covered counts averaged over seeds, one row per target.
  std::map<TargetRef, TargetComparison> rowByTarget;
  std::map<TargetRef, std::pair<double, double>> coveredSums;  // strict, emote
  for (const auto& r : runs) {
    TargetComparison& row = rowByTarget[r.target];
    row.target = r.target;
    row.branchTotal = r.branchTotal;
    auto& sums = coveredSums[r.target];
    if (r.mode == ClusterMode::Strict) sums.first += r.branchCovered;
    else sums.second += r.branchCovered;
  }
  double nSeeds = static_cast<double>(std::max<size_t>(1, seeds.size()));
  for (auto& [target, row] : rowByTarget) {
    row.strictCovered = coveredSums[target].first / nSeeds;
    row.emoteCovered = coveredSums[target].second / nSeeds;
    row.strictPct = row.branchTotal == 0 ? 100.0
                                         : 100.0 * row.strictCovered / row.branchTotal;
    row.emotePct = row.branchTotal == 0 ? 100.0
                                        : 100.0 * row.emoteCovered / row.branchTotal;
    row.deltaPct = row.emotePct - row.strictPct;
    report.rows.push_back(row);
  }

  // Per-file and total aggregates pool branches before taking percentages.
  std::map<std::string, FileAggregate> byFile;
  for (const auto& row : report.rows) {
    FileAggregate& agg = byFile[row.target.file];
    agg.file = row.target.file;
    agg.branchTotal += row.branchTotal;
    agg.strictCovered += row.strictCovered;
    agg.emoteCovered += row.emoteCovered;
  }
  auto finishAggregate = [](FileAggregate& agg) {
    agg.strictPct = agg.branchTotal == 0 ? 100.0
                                         : 100.0 * agg.strictCovered / agg.branchTotal;
    agg.emotePct = agg.branchTotal == 0 ? 100.0
                                        : 100.0 * agg.emoteCovered / agg.branchTotal;
    agg.deltaPct = agg.emotePct - agg.strictPct;
  };
  report.total.file = "TOTAL";
  for (auto& [file, agg] : byFile) {
    finishAggregate(agg);
    report.files.push_back(agg);
    report.total.branchTotal += agg.branchTotal;
    report.total.strictCovered += agg.strictCovered;
    report.total.emoteCovered += agg.emoteCovered;
  }
  finishAggregate(report.total);

  // Heatmap over per-target averaged percentages.
  std::map<std::pair<int, int>, int> cells;
  for (const auto& row : report.rows)
    ++cells[{coverageBin(row.strictPct), coverageBin(row.emotePct)}];
  for (const auto& [key, count] : cells)
    report.heatmap.push_back({key.first, key.second, count});

  // Mean coverage per mode at integer seconds, runs resampled as step
  // functions so early-stopped runs hold their final value.
  int horizon = static_cast<int>(std::ceil(base.budgetSeconds));
  for (ClusterMode mode : {ClusterMode::Strict, ClusterMode::Emote}) {
    for (int t = 0; t <= horizon; ++t) {
      double sum = 0.0;
      int n = 0;
      for (const auto& r : runs) {
        if (r.mode != mode) continue;
        sum += timelineValueAt(r.timeline, t);
        ++n;
      }
      if (n > 0) report.timeline.push_back({t, modeName(mode), sum / n});
    }
  }
  return report;
}

}  // namespace modgen
