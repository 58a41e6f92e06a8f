#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fuselect/csv.hpp"
#include "fuselect/record.hpp"

namespace fuselect::synth {

enum class Regime : std::uint8_t {
  ConfidentCorrect = 0,
  ConfidentWrong = 1,
  ConfusedCorrect = 2,
  ConfusedWrongSentimentHelps = 3,
  ConfusedWrongSentimentHurts = 4,
};

inline constexpr std::array<Regime, 5> kRegimes{
    Regime::ConfidentCorrect, Regime::ConfidentWrong, Regime::ConfusedCorrect,
    Regime::ConfusedWrongSentimentHelps, Regime::ConfusedWrongSentimentHurts};

constexpr std::string_view name(Regime r) noexcept {
  switch (r) {
    case Regime::ConfidentCorrect: return "confident-correct";
    case Regime::ConfidentWrong: return "confident-wrong";
    case Regime::ConfusedCorrect: return "confused-correct";
    case Regime::ConfusedWrongSentimentHelps: return "confused-wrong-sentiment-helps";
    case Regime::ConfusedWrongSentimentHurts: return "confused-wrong-sentiment-hurts";
  }
  return "?";
}

inline std::optional<Regime> parse_regime(std::string_view s) noexcept {
  for (Regime r : kRegimes)
    if (name(r) == s) return r;
  return std::nullopt;
}

constexpr bool is_wrong(Regime r) noexcept {
  return r == Regime::ConfidentWrong || r == Regime::ConfusedWrongSentimentHelps ||
         r == Regime::ConfusedWrongSentimentHurts;
}

struct CorpusSpec {
  std::size_t n_records = 1000;
  int folds = 1;
  std::map<Regime, double> regime_mix{{Regime::ConfidentCorrect, 1.0}};
  /// Peak weight c of confident scores, (c e_target + g) / (c + 1); > 1.
  double concentration_confident = 4.0;
  /// Noise weight s of confused scores, (1 - s) uniform + s g; in (0, 1].
  double concentration_confused = 0.3;
  std::uint64_t seed = 0;
};

class GenerationError : public Error {
public:
  using Error::Error;
};

inline void validate(const CorpusSpec& spec) {
  if (spec.n_records < 1) throw GenerationError("n_records must be >= 1");
  if (spec.folds < 1) throw GenerationError("folds must be >= 1");
  double sum = 0.0;
  for (auto [r, f] : spec.regime_mix) {
    if (!(f >= 0.0)) throw GenerationError("regime fraction must be >= 0");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw GenerationError("regime fractions must sum to 1");
  if (!(spec.concentration_confident > 1.0))
    throw GenerationError("concentration_confident must be > 1");
  if (!(spec.concentration_confused > 0.0) || spec.concentration_confused > 1.0)
    throw GenerationError("concentration_confused must be in (0, 1]");
}

/// Independent stream per (seed, counter) so records can be generated in any
/// order or in parallel.
inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t counter) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  std::seed_seq seq{mix(seed), mix(counter ^ 0xD1B54A32D192ED03ull), mix(seed + counter)};
  return std::mt19937_64(seq);
}

/// Symmetric Dirichlet draw: normalized Gamma(concentration, 1) variates.
template <std::size_t N, typename Rng>
std::array<double, N> sample_simplex(double concentration, Rng& rng) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::array<double, N> p{};
  double sum = 0.0;
  while (!(sum > 0.0)) {
    sum = 0.0;
    for (double& x : p) {
      x = gamma(rng);
      sum += x;
    }
  }
  for (double& x : p) x /= sum;
  return p;
}

/// Runtime-dimension variant, dim in {3, 4}.
template <typename Rng>
std::vector<double> sample_simplex(std::size_t dim, double concentration, Rng& rng) {
  if (dim == 3) {
    auto a = sample_simplex<3>(concentration, rng);
    return {a.begin(), a.end()};
  }
  if (dim == 4) {
    auto a = sample_simplex<4>(concentration, rng);
    return {a.begin(), a.end()};
  }
  throw GenerationError("sample_simplex supports dim 3 or 4");
}

struct Planted {
  std::string id;
  Regime regime;
};

struct Corpus {
  Records records;
  std::vector<Planted> planted;  // sidecar, never part of the score file
};

namespace detail {

template <typename Rng>
std::size_t uniform_index(std::size_t n, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

template <typename Rng>
double uniform(double lo, double hi, Rng& rng) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <typename Rng>
Emotion other_emotion(Emotion e, Rng& rng) {
  auto k = uniform_index(3, rng);
  auto i = (index(e) + 1 + k) % kNumEmotions;
  return static_cast<Emotion>(i);
}

/// Puts the largest component at position `target`.
inline void move_max_to(std::array<double, 4>& p, std::size_t target) {
  auto top = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  std::swap(p[top], p[target]);
}

template <typename Rng>
std::array<double, 4> confident_scores(Emotion target, double c, Rng& rng) {
  auto g = sample_simplex<4>(1.0, rng);
  std::array<double, 4> p{};
  for (std::size_t i = 0; i < 4; ++i) p[i] = g[i] / (c + 1.0);
  p[index(target)] += c / (c + 1.0);
  return p;
}

template <typename Rng>
std::array<double, 4> confused_scores(Emotion target, double s, Rng& rng) {
  auto g = sample_simplex<4>(1.0, rng);
  std::array<double, 4> p{};
  for (std::size_t i = 0; i < 4; ++i) p[i] = (1.0 - s) * 0.25 + s * g[i];
  move_max_to(p, index(target));
  return p;
}

inline Sentiment sentiment_of(Emotion e) noexcept {
  switch (e) {
    case Emotion::Hap: return Sentiment::Positive;
    case Emotion::Neu: return Sentiment::Neutral;
    default: return Sentiment::Negative;
  }
}

/// Sentiment vector peaked on `s`. For Negative, the magnitude of the
/// negative score encodes Ang (moderate) vs Sad (high) so that a mapping
/// threshold can separate them.
template <typename Rng>
std::array<double, 3> sentiment_scores(Sentiment s, Emotion gold, Rng& rng) {
  std::array<double, 3> p{};
  double peak = 0.0;
  if (s == Sentiment::Negative)
    peak = gold == Emotion::Sad ? uniform(0.75, 0.95, rng) : uniform(0.45, 0.6, rng);
  else
    peak = uniform(0.55, 0.95, rng);
  const double rest = 1.0 - peak;
  const double u = uniform(0.2, 0.8, rng);
  std::size_t j = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (i == index(s))
      p[i] = peak;
    else
      p[i] = (j++ == 0) ? rest * u : rest * (1.0 - u);
  }
  return p;
}

}  // namespace detail

/// Score records with planted structure. Row i lands in fold (i mod folds)+1
/// and in train / val / test with probability 0.7 / 0.1 / 0.2. Each row uses
/// its own counter-based stream, so output depends only on (spec, i).
inline Corpus generate_corpus(const CorpusSpec& spec) {
  validate(spec);
  std::vector<std::pair<Regime, double>> cumulative;
  double acc = 0.0;
  for (Regime r : kRegimes) {
    auto it = spec.regime_mix.find(r);
    if (it == spec.regime_mix.end() || it->second <= 0.0) continue;
    acc += it->second;
    cumulative.emplace_back(r, acc);
  }

  Corpus out;
  out.records.reserve(spec.n_records);
  out.planted.reserve(spec.n_records);
  const int width = static_cast<int>(std::to_string(spec.n_records).size());
  for (std::size_t i = 0; i < spec.n_records; ++i) {
    auto rng = stream(spec.seed, i);

    const double u = detail::uniform(0.0, acc, rng);
    Regime regime = cumulative.back().first;
    for (auto [r, c] : cumulative)
      if (u < c) {
        regime = r;
        break;
      }

    const double su = detail::uniform(0.0, 1.0, rng);
    const Split split = su < 0.7 ? Split::Train : (su < 0.8 ? Split::Val : Split::Test);
    const int fold = static_cast<int>(i % static_cast<std::size_t>(spec.folds)) + 1;

    const Emotion gold = kEmotions[detail::uniform_index(kNumEmotions, rng)];
    Emotion predicted = is_wrong(regime) ? detail::other_emotion(gold, rng) : gold;
    // Sentiment cannot separate the two negative classes from each other, so
    // a repairable error never confuses Ang with Sad.
    if (regime == Regime::ConfusedWrongSentimentHelps && detail::sentiment_of(gold) == Sentiment::Negative &&
        detail::sentiment_of(predicted) == Sentiment::Negative)
      predicted = detail::uniform_index(2, rng) == 0 ? Emotion::Hap : Emotion::Neu;

    std::array<double, 4> ps{};
    if (regime == Regime::ConfidentCorrect || regime == Regime::ConfidentWrong)
      ps = detail::confident_scores(predicted, spec.concentration_confident, rng);
    else
      ps = detail::confused_scores(predicted, spec.concentration_confused, rng);

    Sentiment s = detail::sentiment_of(gold);
    if (regime == Regime::ConfusedWrongSentimentHelps) {
      // Refer mapping should pick the gold class among Ang/Sad.
      if (s == Sentiment::Negative) {
        const Emotion other = gold == Emotion::Ang ? Emotion::Sad : Emotion::Ang;
        if (ps[index(other)] > ps[index(gold)])
          std::swap(ps[index(other)], ps[index(gold)]);
      }
    } else if (regime == Regime::ConfusedWrongSentimentHurts) {
      // Any sentiment whose mapping cannot give the gold label.
      std::vector<Sentiment> wrong;
      for (Sentiment t : kSentiments)
        if (t != s) wrong.push_back(t);
      s = wrong[detail::uniform_index(wrong.size(), rng)];
    } else if (detail::uniform(0.0, 1.0, rng) < 0.5) {
      s = kSentiments[detail::uniform_index(kNumSentiments, rng)];
    }
    const auto pt = detail::sentiment_scores(s, gold, rng);

    std::string num = std::to_string(i);
    std::string id = "u" + std::string(static_cast<std::size_t>(width) - num.size(), '0') + num;
    out.records.push_back(make_record(id, fold, split, gold, EmotionScore{ps}, SentimentScore{pt}));
    out.planted.push_back({std::move(id), regime});
  }
  return out;
}

inline void write_planted(std::ostream& out, const std::vector<Planted>& planted) {
  out << "id,regime\n";
  for (const auto& p : planted) out << p.id << ',' << name(p.regime) << '\n';
}

/// "confident-correct=0.7,confused-wrong-sentiment-helps=0.3"
inline std::map<Regime, double> parse_mix(std::string_view text) {
  std::map<Regime, double> mix;
  for (auto item : csv::split(text)) {
    auto eq = item.find('=');
    if (eq == std::string_view::npos) throw GenerationError("mix entry needs regime=fraction");
    auto r = parse_regime(item.substr(0, eq));
    auto f = csv::to_double(item.substr(eq + 1));
    if (!r) throw GenerationError("unknown regime '" + std::string(item.substr(0, eq)) + "'");
    if (!f) throw GenerationError("bad fraction in '" + std::string(item) + "'");
    mix[*r] += *f;
  }
  return mix;
}

}  // namespace fuselect::synth
