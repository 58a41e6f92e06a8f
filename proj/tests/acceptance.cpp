// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is nonzero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fuselect.hpp"
#include "support/fold_tables.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace fuselect;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

struct Criterion {
  int number;
  std::string title;
  double budget_s;  // 0 = no runtime bound
  std::function<Outcome()> run;
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << std::fixed << x;
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string sci(double x) {
  std::ostringstream s;
  s.precision(2);
  s << std::scientific << x;
  return s.str();
}

double round2(double x) { return std::round(x * 100.0) / 100.0; }

Outcome uncertainty_math() {
  Outcome o;
  gen::Rng rng(1);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = gen::simplex<4>(rng);
    const std::vector<double> v(p.begin(), p.end());
    worst = std::max(worst, std::abs(entropy(v) - oracle::entropy_q(v)));
    worst = std::max(worst, std::abs(varentropy(v) - oracle::varentropy_q(v)));
  }
  o.require(worst <= 1e-12, "max oracle error " + sci(worst));
  const std::vector<double> u(4, 0.25);
  o.require(std::abs(entropy(u) - std::log(4.0)) <= 1e-12, "entropy(uniform) != ln 4");
  o.require(std::abs(varentropy(u)) <= 1e-12, "varentropy(uniform) != 0");
  o.detail = o.pass ? "10000 vectors, max |error| " + sci(worst) : o.detail;
  return o;
}

Outcome merge_equivalence() {
  Outcome o;
  gen::Rng rng(2);
  std::size_t mismatches = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto r = gen::record(rng, i);
    const auto a = gen::artifact(rng, &r);
    if (merge_record(r, a).final != oracle::oracle_merge(r, a)) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  if (o.pass) o.detail = "100000 pairs, 0 mismatches";
  return o;
}

Outcome grid_optimality() {
  Outcome o;
  gen::Rng rng(3);
  int agree = 0, total = 0;
  while (total < 1000) {
    const auto n = static_cast<std::size_t>(gen::integer(rng, 1, 500));
    const auto rs = total % 2 ? synth::generate_corpus(gen::corpus_spec(rng, n)).records : gen::records(rng, n);
    const Emotion c = kEmotions[gen::integer(rng, 0, 3)];
    if (predicted_as(rs, c).empty()) continue;
    const auto got = search_thresholds(rs, c);
    const auto want = oracle::oracle_grid_search(rs, c, 10, 1);
    ++total;
    agree += got.k == want.k && got.l == want.l && got.tau_e == want.tau_e && got.tau_v == want.tau_v;
  }
  o.require(agree == total, std::to_string(total - agree) + " disagreements");
  o.detail = std::to_string(agree) + "/" + std::to_string(total) + " class-corpora agree";
  return o;
}

Outcome identity_invariants() {
  Outcome o;
  gen::Rng rng(4);
  std::size_t violations = 0, checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto rs = synth::generate_corpus(gen::corpus_spec(rng, 300)).records;
    auto full = gen::artifact(rng);
    full.exclusion = ExclusionSet::full();
    auto never = gen::artifact(rng);
    for (Emotion c : kEmotions) never.thresholds[c] = ClassThresholds::never_trigger();
    for (const auto& r : rs) {
      violations += merge_record(r, full).final != r.prediction;
      violations += merge_record(r, never).final != r.prediction;
      checked += 2;
    }
  }
  o.require(violations == 0, std::to_string(violations) + " records changed");
  if (o.pass) o.detail = "100 corpora, " + std::to_string(checked) + " merges unchanged";
  return o;
}

Outcome exclusion_soundness() {
  Outcome o;
  gen::Rng rng(5);
  int worse = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto rs = synth::generate_corpus(gen::corpus_spec(rng, 400)).records;
    auto a = calibrate_fold(rs);
    const auto with = count_correct(rs, a);
    a.exclusion = {};
    const auto without = count_correct(rs, a);
    worse += with < without;
  }
  o.require(worse == 0, std::to_string(worse) + " corpora lost training WA");
  if (o.pass) o.detail = "100 corpora, training WA never lowered";
  return o;
}

Outcome fusion_lift() {
  Outcome o;
  synth::CorpusSpec spec;
  spec.n_records = 10000;
  spec.folds = 10;
  spec.seed = 6;
  spec.regime_mix = {{synth::Regime::ConfidentCorrect, 0.5},
                     {synth::Regime::ConfusedWrongSentimentHelps, 0.3},
                     {synth::Regime::ConfusedCorrect, 0.1},
                     {synth::Regime::ConfidentWrong, 0.05},
                     {synth::Regime::ConfusedWrongSentimentHurts, 0.05}};
  const auto rs = synth::generate_corpus(spec).records;
  const auto out = fs::temp_directory_path() / "fuselect_acceptance_lift";
  fs::remove_all(out);
  const auto avg = average_folds(run_pipeline(rs, {}, out));
  fs::remove_all(out);
  const auto d = avg.change();
  o.require(d.wa >= 2.0, "WA lift " + fmt(d.wa, 2));
  o.require(d.ua >= 2.0, "UA lift " + fmt(d.ua, 2));
  o.require(d.f1 >= 2.0, "F1 lift " + fmt(d.f1, 2));
  if (o.pass)
    o.detail = "10 folds, WA " + fmt(avg.before.wa, 2) + "->" + fmt(avg.after.wa, 2) + ", UA " +
               fmt(avg.before.ua, 2) + "->" + fmt(avg.after.ua, 2) + ", F1 " + fmt(avg.before.f1, 2) +
               "->" + fmt(avg.after.f1, 2);
  return o;
}

Outcome fold_average_arithmetic() {
  Outcome o;
  auto cell = [&](const std::string& label, double got, double want) {
    o.require(round2(got) == want, label + " " + fmt(got, 3) + " != " + fmt(want, 2));
  };
  const auto iemocap = average_folds(fixtures::kIemocap);
  cell("IEMOCAP before UA", iemocap.before.ua, fixtures::kIemocapAvg.before.ua);
  cell("IEMOCAP before WA", iemocap.before.wa, fixtures::kIemocapAvg.before.wa);
  cell("IEMOCAP before F1", iemocap.before.f1, fixtures::kIemocapAvg.before.f1);
  const auto msp = average_folds(fixtures::kMspImprov);
  cell("MSP-IMPROV before UA", msp.before.ua, fixtures::kMspImprovAvg.before.ua);
  cell("MSP-IMPROV before WA", msp.before.wa, fixtures::kMspImprovAvg.before.wa);
  cell("MSP-IMPROV before F1", msp.before.f1, fixtures::kMspImprovAvg.before.f1);
  o.require(std::abs(iemocap.after.ua - fixtures::kIemocapAvg.after.ua) <= 0.05,
            "IEMOCAP after UA " + fmt(iemocap.after.ua, 3) + " outside 65.81 +/- 0.05");
  if (o.pass) o.detail = "all averaged cells reproduced";
  return o;
}

Outcome metrics_oracle() {
  Outcome o;
  gen::Rng rng(8);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<Emotion> gold, pred;
    ConfusionMatrix::Counts c{};
    for (auto& row : c)
      for (auto& n : row) n = static_cast<std::size_t>(gen::integer(rng, 0, 3) ? gen::integer(rng, 0, 50) : 0);
    c[gen::integer(rng, 0, 3)][gen::integer(rng, 0, 3)] += 1;
    for (std::size_t g = 0; g < 4; ++g)
      for (std::size_t p = 0; p < 4; ++p)
        for (std::size_t k = 0; k < c[g][p]; ++k) {
          gold.push_back(kEmotions[g]);
          pred.push_back(kEmotions[p]);
        }
    const ConfusionMatrix cm(c);
    const auto want = oracle::recount(gold, pred);
    worst = std::max({worst, std::abs(ua(cm) - want.ua), std::abs(wa(cm) - want.wa),
                      std::abs(macro_f1(cm) - want.f1)});
  }
  o.require(worst <= 1e-12, "max error " + sci(worst));
  if (o.pass) o.detail = "1000 matrices, max |error| " + sci(worst);
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FUSELECT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  Outcome o;
  const auto dir = fs::temp_directory_path() / "fuselect_acceptance_det";
  fs::remove_all(dir);
  const std::string corpus = (dir / "corpus").string();
  o.require(run_cli("synth --out " + corpus + " --seed 9 --records 5000 --n-folds 5 --mix "
                    "confident-correct=0.6,confused-wrong-sentiment-helps=0.3,confused-wrong-sentiment-hurts=0.1") == 0,
            "synth failed");
  const std::string scores = corpus + "/scores.csv";
  o.require(run_cli("pipeline --scores " + scores + " --out " + (dir / "a").string()) == 0, "first run failed");
  o.require(run_cli("pipeline --scores " + scores + " --out " + (dir / "b").string()) == 0, "second run failed");
  std::size_t files = 0;
  if (o.pass) {
    for (const auto& e : fs::directory_iterator(dir / "a")) {
      ++files;
      o.require(slurp(e.path()) == slurp(dir / "b" / e.path().filename()),
                e.path().filename().string() + " differs");
    }
    o.require(files == 5 * 3 + 2, "expected 17 output files, found " + std::to_string(files));
  }
  fs::remove_all(dir);
  if (o.pass) o.detail = std::to_string(files) + " files byte-identical across two CLI runs";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "uncertainty math", 1.0, uncertainty_math},
      {2, "merge equivalence with oracle", 10.0, merge_equivalence},
      {3, "grid-search optimality", 60.0, grid_optimality},
      {4, "identity invariants", 0.0, identity_invariants},
      {5, "exclusion soundness", 0.0, exclusion_soundness},
      {6, "fusion lift on planted corpus", 10.0, fusion_lift},
      {7, "fold-average arithmetic", 0.0, fold_average_arithmetic},
      {8, "metrics oracle", 0.0, metrics_oracle},
      {9, "pipeline determinism", 0.0, determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && secs >= c.budget_s)
      o.require(false, "runtime " + fmt(secs, 2) + " s exceeds " + fmt(c.budget_s, 0) + " s");
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.number << "  " << c.title << "  ("
              << fmt(secs, 2) << " s)  " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
