#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "fuselect/csv.hpp"
#include "fuselect/record.hpp"

namespace fuselect {

inline constexpr std::array<std::string_view, 11> kScoreColumns{
    "id", "fold", "split", "label", "ps_ang", "ps_sad", "ps_hap", "ps_neu",
    "pt_neg", "pt_neu", "pt_pos"};

/// Probability rows whose sum is further than this from 1 are rejected.
inline constexpr double kRejectTolerance = 1e-3;
/// Rows within this distance of 1 are kept verbatim; between the two they are
/// renormalized.
inline constexpr double kExactTolerance = 1e-6;

namespace detail {

inline void check_header(std::string_view header) {
  auto cols = csv::split(csv::strip_cr(header));
  for (auto expected : kScoreColumns) {
    bool found = false;
    for (auto c : cols) found = found || c == expected;
    if (!found) throw SchemaError("score file header is missing column '" + std::string(expected) + "'");
  }
  if (cols.size() != kScoreColumns.size())
    throw SchemaError("score file header has " + std::to_string(cols.size()) +
                      " columns, expected " + std::to_string(kScoreColumns.size()));
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (cols[i] != kScoreColumns[i])
      throw SchemaError("score file column " + std::to_string(i + 1) + " is '" +
                        std::string(cols[i]) + "', expected '" +
                        std::string(kScoreColumns[i]) + "'");
}

template <std::size_t N>
std::array<double, N> read_probabilities(const std::vector<std::string_view>& fields,
                                         std::size_t first, std::size_t line,
                                         std::string_view what) {
  std::array<double, N> p{};
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    auto v = csv::to_double(fields[first + i]);
    if (!v || std::isnan(*v))
      throw RowError(line, "column '" + std::string(kScoreColumns[first + i]) +
                               "' is not a number");
    if (*v < 0.0 || *v > 1.0)
      throw RowError(line, "column '" + std::string(kScoreColumns[first + i]) +
                               "' outside [0, 1]");
    p[i] = *v;
    sum += *v;
  }
  const double dev = std::abs(sum - 1.0);
  if (dev > kRejectTolerance)
    throw RowError(line, std::string(what) + " probabilities sum to " + csv::format(sum));
  if (dev > kExactTolerance)
    for (double& x : p) x /= sum;
  return p;
}

}  // namespace detail

/// Reads a score file. Row order is preserved; derived fields are filled in.
inline Records parse_score_file(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("score file is empty");
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  detail::check_header(line);

  Records out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    auto text = csv::strip_cr(line);
    if (text.empty()) continue;
    auto f = csv::split(text);
    if (f.size() != kScoreColumns.size())
      throw RowError(lineno, "expected " + std::to_string(kScoreColumns.size()) + " fields, got " +
                                 std::to_string(f.size()));
    if (f[0].empty()) throw RowError(lineno, "empty id");
    auto fold = csv::to_int(f[1]);
    if (!fold || *fold < 1) throw RowError(lineno, "fold must be an integer >= 1");
    auto split = parse_split(f[2]);
    if (!split) throw RowError(lineno, "split must be one of train, val, test");
    auto label = parse_emotion(f[3]);
    if (!label) throw RowError(lineno, "label must be one of Ang, Sad, Hap, Neu");

    EmotionScore ps{detail::read_probabilities<kNumEmotions>(f, 4, lineno, "emotion")};
    SentimentScore pt{detail::read_probabilities<kNumSentiments>(f, 8, lineno, "sentiment")};
    out.push_back(make_record(std::string(f[0]), static_cast<int>(*fold), *split, *label, ps, pt));
  }
  return out;
}

inline Records parse_score_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open score file '" + path + "'");
  return parse_score_file(in);
}

/// Canonical form: fixed header, '\n' line endings, shortest round-trip
/// decimals.
inline void write_score_file(std::ostream& out, const Records& records) {
  for (std::size_t i = 0; i < kScoreColumns.size(); ++i)
    out << (i ? "," : "") << kScoreColumns[i];
  out << '\n';
  for (const auto& r : records) {
    out << r.id << ',' << r.fold << ',' << name(r.split) << ',' << name(r.label);
    for (double x : r.ps.values) out << ',' << csv::format(x);
    for (double x : r.pt.values) out << ',' << csv::format(x);
    out << '\n';
  }
}

}  // namespace fuselect
