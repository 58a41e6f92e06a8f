#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fuselect/fusion.hpp"
#include "fuselect/record.hpp"

namespace fuselect {

// Percentile centres of the entropy and varentropy search envelopes.
inline constexpr int kEntropyCentre = 75;
inline constexpr int kVarentropyCentre = 25;

struct CalibrationConfig {
  int delta = 10;            // half-width of the envelope, percentile points
  int step = 1;              // grid spacing, percentile points
  double tau_m_step = 0.05;  // mapping threshold grid spacing
  int fold = 0;              // recorded in the artifact meta
};

/// Linear-interpolation percentile over already sorted values.
inline double percentile_sorted(std::span<const double> sorted, double k) {
  if (sorted.empty()) throw CalibrationError("no training samples for class");
  k = std::clamp(k, 0.0, 100.0);
  const double rank = k / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = static_cast<std::size_t>(std::ceil(rank));
  return sorted[lo] + (rank - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double percentile(std::span<const double> values, double k) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return percentile_sorted(sorted, k);
}

struct Candidate {
  double tau_e = 0.0;
  double tau_v = 0.0;
  int k = 0;
  int l = 0;
};

/// Entropy x varentropy threshold candidates, sorted by (k, l).
struct CandidateGrid {
  Emotion cls = Emotion::Ang;
  std::vector<Candidate> entries;
  int delta = 10;
  int step = 1;

  int steps() const noexcept { return 2 * delta / step; }
};

inline CandidateGrid candidate_grid(std::span<const double> h_values,
                                    std::span<const double> v_values, int delta = 10,
                                    int step = 1, Emotion cls = Emotion::Ang) {
  if (step <= 0 || delta < 0 || (2 * delta) % step != 0)
    throw CalibrationError("grid step " + std::to_string(step) + " must be positive and divide " +
                           std::to_string(2 * delta));
  if (h_values.empty() || v_values.empty()) throw CalibrationError("no training samples for class");

  std::vector<double> hs(h_values.begin(), h_values.end());
  std::vector<double> vs(v_values.begin(), v_values.end());
  std::sort(hs.begin(), hs.end());
  std::sort(vs.begin(), vs.end());

  CandidateGrid grid{cls, {}, delta, step};
  const int n = grid.steps();
  std::vector<double> taus_e(n + 1), taus_v(n + 1);
  for (int i = 0; i <= n; ++i) {
    taus_e[i] = percentile_sorted(hs, kEntropyCentre - delta + i * step);
    taus_v[i] = percentile_sorted(vs, kVarentropyCentre - delta + i * step);
  }
  grid.entries.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int k = 0; k <= n; ++k)
    for (int l = 0; l <= n; ++l) grid.entries.push_back({taus_e[k], taus_v[l], k, l});
  return grid;
}

/// d misclassified among t flagged; m = 100 d / t, or 0 when nothing is flagged.
struct DetectionOutcome {
  std::size_t d = 0;
  std::size_t t = 0;
  double m = 0.0;

  /// Strict "better than" under the selection order: higher m, then higher d.
  /// m is compared exactly by cross-multiplying d / t (t == 0 implies d == 0).
  bool beats(const DetectionOutcome& o) const noexcept {
    const auto lhs = d * (o.t ? o.t : 1);
    const auto rhs = o.d * (t ? t : 1);
    if (lhs != rhs) return lhs > rhs;
    return d > o.d;
  }
};

inline DetectionOutcome make_outcome(std::size_t d, std::size_t t) noexcept {
  return {d, t, t ? 100.0 * static_cast<double>(d) / static_cast<double>(t) : 0.0};
}

inline DetectionOutcome detection_metric(std::span<const ScoreRecord> records, double tau_e,
                                         double tau_v) {
  std::size_t d = 0, t = 0;
  for (const auto& r : records) {
    if (r.h >= tau_e && r.v <= tau_v) {
      ++t;
      if (r.prediction != r.label) ++d;
    }
  }
  return make_outcome(d, t);
}

inline Records predicted_as(std::span<const ScoreRecord> records, Emotion c) {
  Records out;
  for (const auto& r : records)
    if (r.prediction == c) out.push_back(r);
  return out;
}

struct ThresholdChoice {
  double tau_e = 0.0;
  double tau_v = 0.0;
  int k = 0;
  int l = 0;
  DetectionOutcome outcome;
};

/// Grid search over (tau_e, tau_v) for records predicted as `c`. Maximizes m;
/// ties go to larger d, then to the earlier (k, l) grid entry.
inline ThresholdChoice search_thresholds(std::span<const ScoreRecord> train, Emotion c,
                                         int delta = 10, int step = 1) {
  const Records mine = predicted_as(train, c);
  if (mine.empty())
    throw CalibrationError("no training records predicted as " + std::string(name(c)));

  std::vector<double> hs, vs;
  hs.reserve(mine.size());
  vs.reserve(mine.size());
  for (const auto& r : mine) {
    hs.push_back(r.h);
    vs.push_back(r.v);
  }
  const CandidateGrid grid = candidate_grid(hs, vs, delta, step, c);

  // Records sorted by entropy so each tau_e row only scans the flagged suffix.
  std::vector<std::size_t> order(mine.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mine[a].h < mine[b].h; });

  ThresholdChoice best;
  bool have = false;
  for (const Candidate& cand : grid.entries) {
    auto first = std::lower_bound(order.begin(), order.end(), cand.tau_e,
                                  [&](std::size_t i, double tau) { return mine[i].h < tau; });
    std::size_t d = 0, t = 0;
    for (auto it = first; it != order.end(); ++it) {
      const auto& r = mine[*it];
      if (r.v <= cand.tau_v) {
        ++t;
        if (!r.correct()) ++d;
      }
    }
    const DetectionOutcome o = make_outcome(d, t);
    if (!have || o.beats(best.outcome)) {
      best = {cand.tau_e, cand.tau_v, cand.k, cand.l, o};
      have = true;
    }
  }
  return best;
}

/// Mapping-threshold sweep values 0, step, 2 step, ..., 1.
inline std::vector<double> tau_m_grid(double step) {
  if (!(step > 0.0) || step > 1.0) throw CalibrationError("tau_m step must be in (0, 1]");
  const auto n = static_cast<std::size_t>(std::llround(1.0 / step));
  std::vector<double> out;
  for (std::size_t i = 0; i <= n; ++i) out.push_back(std::min(1.0, static_cast<double>(i) * step));
  if (out.back() < 1.0) out.push_back(1.0);
  return out;
}

inline constexpr double kInertTauM = 0.5;

/// Picks tau_m for class `c` among records predicted as c that trigger the
/// fixed entropy/varentropy rule and carry Negative sentiment, maximizing the
/// number of correct "simple" mappings. Ties go to the smaller tau_m.
inline double search_mapping_threshold(std::span<const ScoreRecord> train, Emotion c,
                                       const ClassThresholds& fixed, bool f_i,
                                       double tau_m_step = 0.05) {
  std::vector<const ScoreRecord*> pool;
  for (const auto& r : train)
    if (r.prediction == c && r.sentiment == Sentiment::Negative && triggers(r, fixed))
      pool.push_back(&r);
  if (pool.empty()) return kInertTauM;

  double best_tau = 0.0;
  long best = -1;
  for (double tau : tau_m_grid(tau_m_step)) {
    long correct = 0;
    for (const ScoreRecord* r : pool)
      if (simple_negative_mapping(*r, tau, f_i) == r->label) ++correct;
    if (correct > best) {
      best = correct;
      best_tau = tau;
    }
  }
  return best_tau;
}

/// Per-class thresholds with the mapping threshold found for each flip setting.
struct ClassSearch {
  ClassThresholds base;  // tau_m unset
  double tau_m_plain = kInertTauM;
  double tau_m_flip = kInertTauM;
};

struct StrategyChoice {
  MappingStrategy f_m = MappingStrategy::Refer;
  bool f_i = false;

  friend bool operator==(const StrategyChoice&, const StrategyChoice&) = default;
};

inline std::map<Emotion, ClassThresholds> thresholds_for(const std::map<Emotion, ClassSearch>& s,
                                                         StrategyChoice choice) {
  std::map<Emotion, ClassThresholds> out;
  for (const auto& [c, cs] : s) {
    ClassThresholds t = cs.base;
    t.tau_m = (choice.f_m == MappingStrategy::Simple && choice.f_i) ? cs.tau_m_flip
                                                                    : cs.tau_m_plain;
    out[c] = t;
  }
  return out;
}

inline std::size_t count_correct(std::span<const ScoreRecord> records,
                                 const CalibrationArtifact& calib) {
  std::size_t n = 0;
  for (const auto& r : records)
    if (merge_record(r, calib).final == r.label) ++n;
  return n;
}

/// Runs the merge (empty exclusion set) on the training records under
/// ("refer"), ("simple", no flip) and ("simple", flip) and keeps the highest
/// accuracy, earlier configuration on ties.
inline StrategyChoice select_mapping_strategy(std::span<const ScoreRecord> train,
                                              const std::map<Emotion, ClassSearch>& searches) {
  const StrategyChoice options[] = {{MappingStrategy::Refer, false},
                                    {MappingStrategy::Simple, false},
                                    {MappingStrategy::Simple, true}};
  StrategyChoice best = options[0];
  std::size_t best_correct = 0;
  bool have = false;
  for (const auto& opt : options) {
    CalibrationArtifact a;
    a.thresholds = thresholds_for(searches, opt);
    a.f_m = opt.f_m;
    a.f_i = opt.f_i;
    const auto n = count_correct(train, a);
    if (!have || n > best_correct) {
      best = opt;
      best_correct = n;
      have = true;
    }
  }
  return best;
}

/// Per-transition tallies from merging the training split with no exclusions.
struct TransitionTally {
  std::size_t harmed = 0;  // primary correct, merged wrong
  std::size_t fixed = 0;   // primary wrong, merged correct
};

inline std::map<Transition, TransitionTally> tally_transitions(std::span<const ScoreRecord> train,
                                                               CalibrationArtifact calib) {
  calib.exclusion = {};
  std::map<Transition, TransitionTally> tally;
  for (const auto& r : train) {
    const auto o = merge_record(r, calib);
    if (o.final == r.prediction) continue;
    auto& t = tally[{r.prediction, o.final}];
    if (r.prediction == r.label)
      ++t.harmed;
    else if (o.final == r.label)
      ++t.fixed;
  }
  return tally;
}

/// Transitions that hurt more training records than they fix.
inline ExclusionSet build_exclusion_list(std::span<const ScoreRecord> train,
                                         const CalibrationArtifact& calib) {
  ExclusionSet e;
  for (const auto& [t, n] : tally_transitions(train, calib))
    if (n.harmed > n.fixed) e.insert(t);
  return e;
}

/// Full per-fold calibration from training-split records.
inline CalibrationArtifact calibrate_fold(std::span<const ScoreRecord> train,
                                          const CalibrationConfig& config = {}) {
  if (train.empty()) throw CalibrationError("no training records");
  std::map<Emotion, ClassSearch> searches;
  for (Emotion c : kEmotions) {
    ClassSearch s;
    bool any = false;
    for (const auto& r : train) any = any || r.prediction == c;
    if (!any) {
      s.base = ClassThresholds::never_trigger();
    } else {
      const auto choice = search_thresholds(train, c, config.delta, config.step);
      s.base = {choice.tau_e, choice.tau_v, kInertTauM};
      s.tau_m_plain = search_mapping_threshold(train, c, s.base, false, config.tau_m_step);
      s.tau_m_flip = search_mapping_threshold(train, c, s.base, true, config.tau_m_step);
    }
    searches[c] = s;
  }

  const StrategyChoice strategy = select_mapping_strategy(train, searches);

  CalibrationArtifact a;
  a.thresholds = thresholds_for(searches, strategy);
  a.f_m = strategy.f_m;
  a.f_i = strategy.f_i;
  a.meta.delta_percentile = config.delta;
  a.meta.step_percentile = config.step;
  a.meta.tau_m_step = config.tau_m_step;
  a.meta.created_from_fold = config.fold;
  a.exclusion = build_exclusion_list(train, a);
  return a;
}

}  // namespace fuselect
