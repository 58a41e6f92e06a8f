#pragma once

#include <string>
#include <vector>

#include "fuselect/types.hpp"
#include "fuselect/uncertainty.hpp"

namespace fuselect {

/// One utterance: gold label, both score vectors, fold/split tags and the
/// fields derived from the scores. Build with make_record so the derived
/// fields stay consistent.
struct ScoreRecord {
  std::string id;
  int fold = 1;
  Split split = Split::Train;
  Emotion label = Emotion::Ang;
  EmotionScore ps;
  SentimentScore pt;

  Emotion prediction = Emotion::Ang;
  Sentiment sentiment = Sentiment::Negative;
  double h = 0.0;
  double v = 0.0;

  bool correct() const noexcept { return prediction == label; }

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

inline ScoreRecord make_record(std::string id, int fold, Split split, Emotion label,
                               const EmotionScore& ps, const SentimentScore& pt) {
  ScoreRecord r;
  r.id = std::move(id);
  r.fold = fold;
  r.split = split;
  r.label = label;
  r.ps = ps;
  r.pt = pt;
  r.prediction = ps.argmax();
  r.sentiment = pt.argmax();
  r.h = entropy(ps);
  r.v = varentropy(ps);
  return r;
}

using Records = std::vector<ScoreRecord>;

inline Records select(const Records& records, int fold, Split split) {
  Records out;
  for (const auto& r : records)
    if (r.fold == fold && r.split == split) out.push_back(r);
  return out;
}

}  // namespace fuselect
