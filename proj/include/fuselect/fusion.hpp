#pragma once

#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fuselect/csv.hpp"
#include "fuselect/record.hpp"

namespace fuselect {

struct MergeOutcome {
  Emotion final = Emotion::Ang;
  bool triggered = false;  // entropy/varentropy rule fired
  bool reverted = false;   // change blocked by the exclusion set
  /// (prediction, mapped emotion) whenever the rule fired and proposed a
  /// different class, whether or not the change was applied.
  std::optional<Transition> transition;

  bool changed(const ScoreRecord& r) const noexcept { return final != r.prediction; }

  friend bool operator==(const MergeOutcome&, const MergeOutcome&) = default;
};

/// True when the record falls in the "unreliable" region for its predicted
/// class: entropy at or above tau_e and varentropy at or below tau_v.
inline bool triggers(const ScoreRecord& r, const ClassThresholds& t) noexcept {
  return r.h >= t.tau_e && r.v <= t.tau_v;
}

/// Emotion selected for a Negative sentiment by the "simple" strategy:
/// Ang iff (score of the argmax sentiment <= tau_m) xor flip.
inline Emotion simple_negative_mapping(const ScoreRecord& r, double tau_m, bool flip) noexcept {
  const bool low = r.pt[r.sentiment] <= tau_m;
  return (low != flip) ? Emotion::Ang : Emotion::Sad;
}

inline Emotion map_sentiment(const ScoreRecord& r, const ClassThresholds& t, MappingStrategy f_m,
                             bool f_i) noexcept {
  switch (r.sentiment) {
    case Sentiment::Neutral: return Emotion::Neu;
    case Sentiment::Positive: return Emotion::Hap;
    case Sentiment::Negative: break;
  }
  if (f_m == MappingStrategy::Refer)
    return r.ps[Emotion::Ang] >= r.ps[Emotion::Sad] ? Emotion::Ang : Emotion::Sad;
  return simple_negative_mapping(r, t.tau_m, f_i);
}

inline MergeOutcome merge_record(const ScoreRecord& r, const CalibrationArtifact& calib) {
  const ClassThresholds& t = calib.at(r.prediction);
  MergeOutcome out;
  out.final = r.prediction;
  if (!triggers(r, t)) return out;

  out.triggered = true;
  const Emotion mapped = map_sentiment(r, t, calib.f_m, calib.f_i);
  if (mapped == r.prediction) return out;

  out.transition = Transition{r.prediction, mapped};
  if (calib.exclusion.contains(r.prediction, mapped)) {
    out.reverted = true;
    return out;
  }
  out.final = mapped;
  return out;
}

/// Counts over a merged corpus. Only counts, so aggregation order is
/// irrelevant.
struct ChangeLog {
  std::size_t records = 0;
  std::size_t triggered = 0;
  std::size_t changed = 0;
  std::size_t reverted = 0;
  std::map<Transition, std::size_t> applied;
  std::map<Transition, std::size_t> blocked;

  void add(const MergeOutcome& o) {
    ++records;
    if (o.triggered) ++triggered;
    if (o.reverted) {
      ++reverted;
      ++blocked[*o.transition];
    } else if (o.transition) {
      ++changed;
      ++applied[*o.transition];
    }
  }

  void merge(const ChangeLog& other) {
    records += other.records;
    triggered += other.triggered;
    changed += other.changed;
    reverted += other.reverted;
    for (auto [t, n] : other.applied) applied[t] += n;
    for (auto [t, n] : other.blocked) blocked[t] += n;
  }

  friend bool operator==(const ChangeLog&, const ChangeLog&) = default;
};

struct MergeResult {
  std::vector<MergeOutcome> outcomes;
  ChangeLog log;
};

inline MergeResult merge_corpus(const Records& records, const CalibrationArtifact& calib) {
  MergeResult res;
  res.outcomes.reserve(records.size());
  for (const auto& r : records) {
    res.outcomes.push_back(merge_record(r, calib));
    res.log.add(res.outcomes.back());
  }
  return res;
}

// ---------------------------------------------------------------------------
// Merged-predictions file: id,fold,split,label,primary,final,triggered,reverted

struct MergedRow {
  std::string id;
  int fold = 1;
  Split split = Split::Test;
  Emotion label = Emotion::Ang;
  Emotion primary = Emotion::Ang;
  Emotion final = Emotion::Ang;
  bool triggered = false;
  bool reverted = false;

  friend bool operator==(const MergedRow&, const MergedRow&) = default;
};

inline constexpr std::string_view kMergedHeader =
    "id,fold,split,label,primary,final,triggered,reverted";

inline std::vector<MergedRow> merged_rows(const Records& records,
                                          const std::vector<MergeOutcome>& outcomes) {
  std::vector<MergedRow> rows;
  rows.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    rows.push_back({r.id, r.fold, r.split, r.label, r.prediction, outcomes[i].final,
                    outcomes[i].triggered, outcomes[i].reverted});
  }
  return rows;
}

inline void write_merged_file(std::ostream& out, const std::vector<MergedRow>& rows) {
  out << kMergedHeader << '\n';
  for (const auto& r : rows)
    out << r.id << ',' << r.fold << ',' << name(r.split) << ',' << name(r.label) << ','
        << name(r.primary) << ',' << name(r.final) << ',' << (r.triggered ? 1 : 0) << ','
        << (r.reverted ? 1 : 0) << '\n';
}

inline std::vector<MergedRow> parse_merged_file(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || csv::strip_cr(line) != kMergedHeader)
    throw SchemaError("merged file header must be '" + std::string(kMergedHeader) + "'");
  std::vector<MergedRow> rows;
  std::size_t lineno = 1;
  auto flag = [&](std::string_view s) {
    if (s == "0") return false;
    if (s == "1") return true;
    throw RowError(lineno, "flag must be 0 or 1");
  };
  auto emotion = [&](std::string_view s) {
    auto e = parse_emotion(s);
    if (!e) throw RowError(lineno, "bad emotion '" + std::string(s) + "'");
    return *e;
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto text = csv::strip_cr(line);
    if (text.empty()) continue;
    auto f = csv::split(text);
    if (f.size() != 8) throw RowError(lineno, "expected 8 fields");
    auto fold = csv::to_int(f[1]);
    auto split = parse_split(f[2]);
    if (!fold || *fold < 1) throw RowError(lineno, "fold must be an integer >= 1");
    if (!split) throw RowError(lineno, "bad split");
    rows.push_back({std::string(f[0]), static_cast<int>(*fold), *split, emotion(f[3]),
                    emotion(f[4]), emotion(f[5]), flag(f[6]), flag(f[7])});
  }
  return rows;
}

inline std::vector<MergedRow> read_merged_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open merged file '" + path + "'");
  return parse_merged_file(in);
}

/// transition,applied,blocked rows plus totals.
inline void write_change_log(std::ostream& out, const ChangeLog& log) {
  out << "records," << log.records << '\n'
      << "triggered," << log.triggered << '\n'
      << "changed," << log.changed << '\n'
      << "reverted," << log.reverted << '\n'
      << "transition,applied,blocked\n";
  for (Emotion a : kEmotions)
    for (Emotion b : kEmotions) {
      if (a == b) continue;
      Transition t{a, b};
      auto ap = log.applied.find(t);
      auto bl = log.blocked.find(t);
      std::size_t na = ap == log.applied.end() ? 0 : ap->second;
      std::size_t nb = bl == log.blocked.end() ? 0 : bl->second;
      if (na + nb) out << transition_name(t) << ',' << na << ',' << nb << '\n';
    }
}

}  // namespace fuselect
