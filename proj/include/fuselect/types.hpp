#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fuselect {

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input does not follow a file schema (missing column, bad header, bad JSON shape).
class SchemaError : public Error {
public:
  using Error::Error;
};

/// A single data row was rejected; carries the 1-based line number.
class RowError : public Error {
public:
  RowError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

/// Input or precondition failure at the command level (missing fold, fold
/// mismatch, empty split).
class InputError : public Error {
public:
  using Error::Error;
};

class CalibrationError : public Error {
public:
  using Error::Error;
};

class EvaluationError : public Error {
public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Class alphabets. Enumerator order is the canonical order used for
// tie-breaking and serialization.

enum class Emotion : std::uint8_t { Ang = 0, Sad = 1, Hap = 2, Neu = 3 };
enum class Sentiment : std::uint8_t { Negative = 0, Neutral = 1, Positive = 2 };
enum class Split : std::uint8_t { Train = 0, Val = 1, Test = 2 };

inline constexpr std::size_t kNumEmotions = 4;
inline constexpr std::size_t kNumSentiments = 3;

inline constexpr std::array<Emotion, kNumEmotions> kEmotions{Emotion::Ang, Emotion::Sad,
                                                              Emotion::Hap, Emotion::Neu};
inline constexpr std::array<Sentiment, kNumSentiments> kSentiments{
    Sentiment::Negative, Sentiment::Neutral, Sentiment::Positive};

constexpr std::size_t index(Emotion e) noexcept { return static_cast<std::size_t>(e); }
constexpr std::size_t index(Sentiment s) noexcept { return static_cast<std::size_t>(s); }

constexpr std::string_view name(Emotion e) noexcept {
  switch (e) {
    case Emotion::Ang: return "Ang";
    case Emotion::Sad: return "Sad";
    case Emotion::Hap: return "Hap";
    case Emotion::Neu: return "Neu";
  }
  return "?";
}

constexpr std::string_view name(Sentiment s) noexcept {
  switch (s) {
    case Sentiment::Negative: return "Negative";
    case Sentiment::Neutral: return "Neutral";
    case Sentiment::Positive: return "Positive";
  }
  return "?";
}

constexpr std::string_view name(Split s) noexcept {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

inline std::optional<Emotion> parse_emotion(std::string_view s) noexcept {
  for (Emotion e : kEmotions)
    if (name(e) == s) return e;
  return std::nullopt;
}

inline std::optional<Split> parse_split(std::string_view s) noexcept {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Probability vectors

template <typename Class, std::size_t N>
struct Probabilities {
  std::array<double, N> values{};

  static constexpr std::size_t size() noexcept { return N; }
  double operator[](Class c) const noexcept { return values[static_cast<std::size_t>(c)]; }
  double operator[](std::size_t i) const noexcept { return values[i]; }

  double sum() const noexcept {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }

  /// Index of the largest component; the lowest index wins ties.
  Class argmax() const noexcept {
    std::size_t best = 0;
    for (std::size_t i = 1; i < N; ++i)
      if (values[i] > values[best]) best = i;
    return static_cast<Class>(best);
  }

  friend bool operator==(const Probabilities&, const Probabilities&) = default;
};

using EmotionScore = Probabilities<Emotion, kNumEmotions>;
using SentimentScore = Probabilities<Sentiment, kNumSentiments>;

// ---------------------------------------------------------------------------
// Transitions and the exclusion set

struct Transition {
  Emotion from;
  Emotion to;

  friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// "AngSad" style name used in artifacts.
inline std::string transition_name(Transition t) {
  return std::string(name(t.from)) + std::string(name(t.to));
}

inline std::optional<Transition> parse_transition(std::string_view s) noexcept {
  if (s.size() != 6) return std::nullopt;
  auto from = parse_emotion(s.substr(0, 3));
  auto to = parse_emotion(s.substr(3, 3));
  if (!from || !to || *from == *to) return std::nullopt;
  return Transition{*from, *to};
}

/// Ordered (from, to) emotion changes the merge must not apply. Iteration
/// follows canonical class order on (from, to).
class ExclusionSet {
public:
  ExclusionSet() = default;

  void insert(Transition t) {
    if (t.from == t.to)
      throw ValidationError("exclusion set cannot contain self-transition " + transition_name(t));
    entries_.insert(t);
  }
  bool contains(Transition t) const noexcept { return entries_.contains(t); }
  bool contains(Emotion from, Emotion to) const noexcept { return contains({from, to}); }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  /// All 12 ordered pairs of distinct classes.
  static ExclusionSet full() {
    ExclusionSet e;
    for (Emotion a : kEmotions)
      for (Emotion b : kEmotions)
        if (a != b) e.insert({a, b});
    return e;
  }

  friend bool operator==(const ExclusionSet&, const ExclusionSet&) = default;

private:
  std::set<Transition> entries_;
};

// ---------------------------------------------------------------------------
// Thresholds and the calibration artifact

struct ClassThresholds {
  double tau_e = 0.0;  // nats
  double tau_v = 0.0;  // nats^2
  double tau_m = 0.5;

  /// Configuration under which the entropy/varentropy rule can never fire.
  static ClassThresholds never_trigger() noexcept {
    return {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            0.5};
  }
  bool is_never_trigger() const noexcept { return std::isinf(tau_e) && tau_e > 0; }

  friend bool operator==(const ClassThresholds&, const ClassThresholds&) = default;
};

enum class MappingStrategy : std::uint8_t { Refer = 0, Simple = 1 };

constexpr std::string_view name(MappingStrategy m) noexcept {
  return m == MappingStrategy::Refer ? "refer" : "simple";
}

inline std::optional<MappingStrategy> parse_strategy(std::string_view s) noexcept {
  if (s == "refer") return MappingStrategy::Refer;
  if (s == "simple") return MappingStrategy::Simple;
  return std::nullopt;
}

struct ArtifactMeta {
  std::string percentile_method = "percentile-space-linear";
  int delta_percentile = 10;
  int step_percentile = 1;
  double tau_m_step = 0.05;
  std::string log_base = "e";
  int created_from_fold = 0;

  friend bool operator==(const ArtifactMeta&, const ArtifactMeta&) = default;
};

struct CalibrationArtifact {
  std::map<Emotion, ClassThresholds> thresholds;
  MappingStrategy f_m = MappingStrategy::Refer;
  bool f_i = false;
  ExclusionSet exclusion;
  ArtifactMeta meta;

  const ClassThresholds& at(Emotion c) const {
    auto it = thresholds.find(c);
    if (it == thresholds.end())
      throw ValidationError("calibration artifact has no thresholds for class " +
                            std::string(name(c)));
    return it->second;
  }

  friend bool operator==(const CalibrationArtifact&, const CalibrationArtifact&) = default;
};

/// Throws ValidationError unless every invariant of the artifact holds.
inline void validate(const CalibrationArtifact& a) {
  for (Emotion c : kEmotions) {
    auto it = a.thresholds.find(c);
    if (it == a.thresholds.end())
      throw ValidationError("calibration artifact has no thresholds for class " +
                            std::string(name(c)));
    const ClassThresholds& t = it->second;
    const std::string cls(name(c));
    if (std::isnan(t.tau_e) || std::isnan(t.tau_v) || std::isnan(t.tau_m))
      throw ValidationError("NaN threshold for class " + cls);
    if (!t.is_never_trigger()) {
      if (t.tau_e < 0.0) throw ValidationError("tau_e < 0 for class " + cls);
      if (t.tau_v < 0.0) throw ValidationError("tau_v < 0 for class " + cls);
    }
    if (t.tau_m < 0.0 || t.tau_m > 1.0)
      throw ValidationError("tau_m outside [0, 1] for class " + cls);
  }
  if (a.exclusion.size() > 12) throw ValidationError("exclusion set has more than 12 entries");
  if (a.meta.percentile_method.empty() || a.meta.log_base.empty())
    throw ValidationError("artifact meta is incomplete");
  if (a.meta.step_percentile <= 0 || a.meta.delta_percentile < 0 || !(a.meta.tau_m_step > 0.0))
    throw ValidationError("artifact meta has invalid search parameters");
}

}  // namespace fuselect
