#pragma once

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "fuselect/csv.hpp"
#include "fuselect/record.hpp"

namespace fuselect {

enum class Measure : std::uint8_t { Entropy = 0, Varentropy = 1 };

constexpr std::string_view name(Measure m) noexcept {
  return m == Measure::Entropy ? "entropy" : "varentropy";
}

/// Fixed-width bin counts of one measure for one predicted class, split by
/// whether the primary prediction was correct. Both outcomes share the bin
/// edges so they overlay directly.
struct Histogram {
  Emotion cls = Emotion::Ang;
  Measure measure = Measure::Entropy;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> correct;
  std::vector<std::size_t> incorrect;
  double mean_correct = 0.0;
  double mean_incorrect = 0.0;

  std::size_t bins() const noexcept { return correct.size(); }
  double width() const noexcept { return bins() ? (hi - lo) / static_cast<double>(bins()) : 0.0; }
};

/// Observed range is [min, max]; the maximum falls in the last bin. A
/// degenerate range puts everything in bin 0.
inline std::size_t bin_of(double x, double lo, double hi, std::size_t bins) noexcept {
  if (!(hi > lo)) return 0;
  auto b = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
  return std::min(b, bins - 1);
}

inline std::vector<Histogram> diagnose(std::span<const ScoreRecord> records,
                                       std::size_t bins = 30) {
  if (bins == 0) throw ValidationError("histogram needs at least one bin");
  std::vector<Histogram> out;
  for (Emotion c : kEmotions) {
    for (Measure m : {Measure::Entropy, Measure::Varentropy}) {
      Histogram h{c, m, 0.0, 0.0, std::vector<std::size_t>(bins), std::vector<std::size_t>(bins)};
      auto value = [m](const ScoreRecord& r) { return m == Measure::Entropy ? r.h : r.v; };
      bool first = true;
      for (const auto& r : records) {
        if (r.prediction != c) continue;
        const double x = value(r);
        h.lo = first ? x : std::min(h.lo, x);
        h.hi = first ? x : std::max(h.hi, x);
        first = false;
      }
      double sum_c = 0.0, sum_i = 0.0;
      std::size_t n_c = 0, n_i = 0;
      for (const auto& r : records) {
        if (r.prediction != c) continue;
        const double x = value(r);
        const auto b = bin_of(x, h.lo, h.hi, bins);
        if (r.correct()) {
          ++h.correct[b];
          sum_c += x;
          ++n_c;
        } else {
          ++h.incorrect[b];
          sum_i += x;
          ++n_i;
        }
      }
      h.mean_correct = n_c ? sum_c / static_cast<double>(n_c) : 0.0;
      h.mean_incorrect = n_i ? sum_i / static_cast<double>(n_i) : 0.0;
      out.push_back(std::move(h));
    }
  }
  return out;
}

/// class,measure,outcome,bin,lo,hi,count
inline void write_histograms(std::ostream& out, std::span<const Histogram> hists) {
  out << "class,measure,outcome,bin,lo,hi,count\n";
  for (const auto& h : hists) {
    for (int pass = 0; pass < 2; ++pass) {
      const auto& counts = pass == 0 ? h.correct : h.incorrect;
      for (std::size_t b = 0; b < counts.size(); ++b) {
        const double lo = h.lo + h.width() * static_cast<double>(b);
        const double hi = b + 1 == counts.size() ? h.hi : lo + h.width();
        out << name(h.cls) << ',' << name(h.measure) << ',' << (pass == 0 ? "correct" : "incorrect")
            << ',' << b << ',' << csv::format(lo) << ',' << csv::format(hi) << ',' << counts[b]
            << '\n';
      }
    }
  }
}

}  // namespace fuselect
