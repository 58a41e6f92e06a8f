#pragma once

#include <array>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fuselect/csv.hpp"
#include "fuselect/types.hpp"

namespace fuselect {

/// 4x4 counts, rows = gold class, columns = predicted class.
class ConfusionMatrix {
public:
  using Counts = std::array<std::array<std::size_t, kNumEmotions>, kNumEmotions>;

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(const Counts& c) : counts_(c) {}

  void add(Emotion gold, Emotion pred, std::size_t n = 1) noexcept {
    counts_[index(gold)][index(pred)] += n;
  }

  std::size_t operator()(Emotion gold, Emotion pred) const noexcept {
    return counts_[index(gold)][index(pred)];
  }
  const Counts& counts() const noexcept { return counts_; }

  std::size_t row_sum(Emotion gold) const noexcept {
    std::size_t s = 0;
    for (auto n : counts_[index(gold)]) s += n;
    return s;
  }
  std::size_t col_sum(Emotion pred) const noexcept {
    std::size_t s = 0;
    for (const auto& row : counts_) s += row[index(pred)];
    return s;
  }
  std::size_t trace() const noexcept {
    std::size_t s = 0;
    for (std::size_t i = 0; i < kNumEmotions; ++i) s += counts_[i][i];
    return s;
  }
  std::size_t total() const noexcept {
    std::size_t s = 0;
    for (const auto& row : counts_)
      for (auto n : row) s += n;
    return s;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
  Counts counts_{};
};

inline ConfusionMatrix confusion(std::span<const Emotion> gold, std::span<const Emotion> pred) {
  if (gold.size() != pred.size())
    throw EvaluationError("confusion: " + std::to_string(gold.size()) + " gold labels but " +
                          std::to_string(pred.size()) + " predictions");
  if (gold.empty()) throw EvaluationError("confusion: no labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < gold.size(); ++i) cm.add(gold[i], pred[i]);
  return cm;
}

/// Unweighted accuracy: mean recall over classes present in the gold labels, percent.
inline double ua(const ConfusionMatrix& cm) {
  double sum = 0.0;
  int present = 0;
  for (Emotion c : kEmotions) {
    const auto n = cm.row_sum(c);
    if (n == 0) continue;
    sum += static_cast<double>(cm(c, c)) / static_cast<double>(n);
    ++present;
  }
  if (present == 0) throw EvaluationError("UA of an empty confusion matrix");
  return 100.0 * sum / present;
}

/// Weighted accuracy: trace / total, percent.
inline double wa(const ConfusionMatrix& cm) {
  const auto n = cm.total();
  if (n == 0) throw EvaluationError("WA of an empty confusion matrix");
  return 100.0 * static_cast<double>(cm.trace()) / static_cast<double>(n);
}

/// Macro F1 over all four classes, percent. A class with P + R = 0 scores 0.
inline double macro_f1(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw EvaluationError("F1 of an empty confusion matrix");
  double sum = 0.0;
  for (Emotion c : kEmotions) {
    const double tp = static_cast<double>(cm(c, c));
    const auto predicted = cm.col_sum(c);
    const auto actual = cm.row_sum(c);
    const double p = predicted ? tp / static_cast<double>(predicted) : 0.0;
    const double r = actual ? tp / static_cast<double>(actual) : 0.0;
    sum += (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  return 100.0 * sum / static_cast<double>(kNumEmotions);
}

struct Scores {
  double ua = 0.0;
  double wa = 0.0;
  double f1 = 0.0;

  friend bool operator==(const Scores&, const Scores&) = default;
};

inline Scores score(const ConfusionMatrix& cm) { return {ua(cm), wa(cm), macro_f1(cm)}; }

/// Primary-only ("before") and merged ("after") metrics of one fold.
struct FoldReport {
  int fold = 0;
  Scores before;
  Scores after;

  Scores change() const noexcept {
    return {after.ua - before.ua, after.wa - before.wa, after.f1 - before.f1};
  }

  friend bool operator==(const FoldReport&, const FoldReport&) = default;
};

/// Unweighted mean of every metric across folds. The result has fold = 0.
inline FoldReport average_folds(std::span<const FoldReport> reports) {
  if (reports.empty()) throw EvaluationError("average_folds: no reports");
  FoldReport avg;
  for (const auto& r : reports) {
    avg.before.ua += r.before.ua;
    avg.before.wa += r.before.wa;
    avg.before.f1 += r.before.f1;
    avg.after.ua += r.after.ua;
    avg.after.wa += r.after.wa;
    avg.after.f1 += r.after.f1;
  }
  const double n = static_cast<double>(reports.size());
  for (Scores* s : {&avg.before, &avg.after}) {
    s->ua /= n;
    s->wa /= n;
    s->f1 /= n;
  }
  if (reports.size() == 1) avg.fold = reports.front().fold;
  return avg;
}

/// fold,variant,ua,wa,f1 with an AVG row pair at the end.
inline void write_report(std::ostream& out, std::span<const FoldReport> reports) {
  out << "fold,variant,ua,wa,f1\n";
  auto row = [&](const std::string& fold, const char* variant, const Scores& s) {
    out << fold << ',' << variant << ',' << csv::format(s.ua) << ',' << csv::format(s.wa) << ','
        << csv::format(s.f1) << '\n';
  };
  for (const auto& r : reports) {
    row(std::to_string(r.fold), "before", r.before);
    row(std::to_string(r.fold), "after", r.after);
  }
  const auto avg = average_folds(reports);
  row("AVG", "before", avg.before);
  row("AVG", "after", avg.after);
}

/// fold,ua,wa,f1 deltas (after - before), AVG last.
inline void write_changes(std::ostream& out, std::span<const FoldReport> reports) {
  out << "fold,ua,wa,f1\n";
  auto row = [&](const std::string& fold, const Scores& s) {
    out << fold << ',' << csv::format(s.ua) << ',' << csv::format(s.wa) << ','
        << csv::format(s.f1) << '\n';
  };
  for (const auto& r : reports) row(std::to_string(r.fold), r.change());
  row("AVG", average_folds(reports).change());
}

/// Human-readable table: Before / After (Change) per metric, two decimals.
inline void print_table(std::ostream& out, std::span<const FoldReport> reports) {
  auto cell = [](double before, double after) {
    return csv::fixed(before, 2) + "  " + csv::fixed(after, 2) + " (" +
           csv::fixed(after - before, 2) + ")";
  };
  auto line = [&](const std::string& fold, const FoldReport& r) {
    out << fold << " | UA " << cell(r.before.ua, r.after.ua) << " | WA "
        << cell(r.before.wa, r.after.wa) << " | F1 " << cell(r.before.f1, r.after.f1) << '\n';
  };
  for (const auto& r : reports) line(std::to_string(r.fold), r);
  line("AVG", average_folds(reports));
}

}  // namespace fuselect
