#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fuselect/artifact_io.hpp"
#include "fuselect/calibrator.hpp"
#include "fuselect/fusion.hpp"
#include "fuselect/metrics.hpp"
#include "fuselect/parallel.hpp"
#include "fuselect/record.hpp"

namespace fuselect {

struct PipelineConfig {
  int delta = 10;
  int step = 1;
  double tau_m_step = 0.05;
  std::optional<std::vector<int>> folds;  // nullopt = every fold in the score file
  std::size_t bins = 30;

  CalibrationConfig calibration(int fold) const { return {delta, step, tau_m_step, fold}; }
};

/// Distinct folds present in the records, ascending.
inline std::vector<int> folds_in(const Records& records) {
  std::set<int> s;
  for (const auto& r : records) s.insert(r.fold);
  return {s.begin(), s.end()};
}

inline std::vector<int> resolve_folds(const Records& records, const PipelineConfig& config) {
  const auto present = folds_in(records);
  if (!config.folds) return present;
  std::set<int> want(config.folds->begin(), config.folds->end());
  for (int f : want)
    if (!std::binary_search(present.begin(), present.end(), f))
      throw InputError("fold " + std::to_string(f) + " does not appear in the score file");
  return {want.begin(), want.end()};
}

inline CalibrationArtifact calibrate_on(const Records& records, int fold,
                                        const PipelineConfig& config) {
  const Records train = select(records, fold, Split::Train);
  if (train.empty())
    throw InputError("fold " + std::to_string(fold) + " has no train rows");
  return calibrate_fold(train, config.calibration(fold));
}

struct AppliedFold {
  int fold = 0;
  std::vector<MergedRow> rows;
  ChangeLog log;
};

/// Merges the test split of `fold` with an artifact calibrated on that fold.
inline AppliedFold apply_on(const Records& records, const CalibrationArtifact& calib, int fold) {
  if (calib.meta.created_from_fold != fold)
    throw InputError("artifact was calibrated on fold " +
                     std::to_string(calib.meta.created_from_fold) + ", not fold " +
                     std::to_string(fold));
  const Records test = select(records, fold, Split::Test);
  if (test.empty()) throw InputError("fold " + std::to_string(fold) + " has no test rows");
  auto merged = merge_corpus(test, calib);
  return {fold, merged_rows(test, merged.outcomes), std::move(merged.log)};
}

/// One FoldReport per fold found in the rows, ascending by fold.
inline std::vector<FoldReport> evaluate_rows(const std::vector<MergedRow>& rows) {
  std::map<int, std::pair<ConfusionMatrix, ConfusionMatrix>> by_fold;
  for (const auto& r : rows) {
    auto& [before, after] = by_fold[r.fold];
    before.add(r.label, r.primary);
    after.add(r.label, r.final);
  }
  if (by_fold.empty()) throw EvaluationError("no merged rows to evaluate");
  std::vector<FoldReport> out;
  for (const auto& [fold, cms] : by_fold) out.push_back({fold, score(cms.first), score(cms.second)});
  return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace detail

inline std::string calib_filename(int fold) { return "calib_fold" + std::to_string(fold) + ".json"; }
inline std::string merged_filename(int fold) { return "merged_fold" + std::to_string(fold) + ".csv"; }
inline std::string changelog_filename(int fold) {
  return "changelog_fold" + std::to_string(fold) + ".csv";
}

/// Calibrates every selected fold (concurrently) and writes
/// calib_fold<k>.json files. Returns the artifacts in fold order.
inline std::vector<std::pair<int, CalibrationArtifact>> run_calibrate(
    const Records& records, const PipelineConfig& config, const std::filesystem::path& out_dir) {
  const auto folds = resolve_folds(records, config);
  std::vector<std::pair<int, CalibrationArtifact>> result(folds.size());
  parallel_for(folds.size(), [&](std::size_t i) {
    result[i] = {folds[i], calibrate_on(records, folds[i], config)};
  });
  std::filesystem::create_directories(out_dir);
  for (const auto& [fold, a] : result) detail::write_file(out_dir / calib_filename(fold), write_calibration(a));
  return result;
}

inline void write_applied(const AppliedFold& applied, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ostringstream merged, log;
  write_merged_file(merged, applied.rows);
  write_change_log(log, applied.log);
  detail::write_file(out_dir / merged_filename(applied.fold), merged.str());
  detail::write_file(out_dir / changelog_filename(applied.fold), log.str());
}

inline void write_evaluation(const std::vector<FoldReport>& reports,
                             const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ostringstream report, changes;
  write_report(report, reports);
  write_changes(changes, reports);
  detail::write_file(out_dir / "report.csv", report.str());
  detail::write_file(out_dir / "changes.csv", changes.str());
}

/// calibrate -> apply -> evaluate over the selected folds.
inline std::vector<FoldReport> run_pipeline(const Records& records, const PipelineConfig& config,
                                            const std::filesystem::path& out_dir) {
  const auto folds = resolve_folds(records, config);
  std::vector<CalibrationArtifact> artifacts(folds.size());
  std::vector<AppliedFold> applied(folds.size());
  parallel_for(folds.size(), [&](std::size_t i) {
    artifacts[i] = calibrate_on(records, folds[i], config);
    applied[i] = apply_on(records, artifacts[i], folds[i]);
  });

  std::filesystem::create_directories(out_dir);
  std::vector<MergedRow> all;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    detail::write_file(out_dir / calib_filename(folds[i]), write_calibration(artifacts[i]));
    write_applied(applied[i], out_dir);
    all.insert(all.end(), applied[i].rows.begin(), applied[i].rows.end());
  }
  auto reports = evaluate_rows(all);
  write_evaluation(reports, out_dir);
  return reports;
}

}  // namespace fuselect
