#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "fuselect/pipeline.hpp"
#include "fuselect/synth.hpp"

using namespace fuselect;
namespace fs = std::filesystem;

namespace {

Records corpus(int folds, std::uint64_t seed = 11, std::size_t n = 2000) {
  synth::CorpusSpec spec;
  spec.n_records = n;
  spec.folds = folds;
  spec.seed = seed;
  spec.regime_mix = {{synth::Regime::ConfidentCorrect, 0.55},
                     {synth::Regime::ConfusedWrongSentimentHelps, 0.3},
                     {synth::Regime::ConfusedCorrect, 0.1},
                     {synth::Regime::ConfidentWrong, 0.05}};
  return synth::generate_corpus(spec).records;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fuselect_pipeline_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Pipeline, FoldSelection) {
  const auto rs = corpus(4);
  EXPECT_EQ(folds_in(rs), (std::vector<int>{1, 2, 3, 4}));
  PipelineConfig c;
  EXPECT_EQ(resolve_folds(rs, c), (std::vector<int>{1, 2, 3, 4}));
  c.folds = std::vector<int>{3, 1, 3};
  EXPECT_EQ(resolve_folds(rs, c), (std::vector<int>{1, 3}));
  c.folds = std::vector<int>{5};
  EXPECT_THROW(resolve_folds(rs, c), InputError);
}

TEST(Pipeline, MissingSplitsAreInputErrors) {
  auto rs = corpus(2);
  Records no_train, no_test;
  for (const auto& r : rs) {
    if (r.split != Split::Train) no_train.push_back(r);
    if (r.split != Split::Test) no_test.push_back(r);
  }
  EXPECT_THROW(calibrate_on(no_train, 1, {}), InputError);
  const auto a = calibrate_on(no_test, 1, {});
  EXPECT_THROW(apply_on(no_test, a, 1), InputError);
  EXPECT_THROW(apply_on(rs, a, 2), InputError);
}

TEST(Pipeline, WritesEveryArtifact) {
  const auto out = scratch("files");
  const auto reports = run_pipeline(corpus(3), {}, out);
  ASSERT_EQ(reports.size(), 3u);
  for (int f = 1; f <= 3; ++f) {
    EXPECT_TRUE(fs::exists(out / calib_filename(f)));
    EXPECT_TRUE(fs::exists(out / merged_filename(f)));
    EXPECT_TRUE(fs::exists(out / changelog_filename(f)));
    const auto a = read_calibration_file(out / calib_filename(f));
    EXPECT_EQ(a.meta.created_from_fold, f);
  }
  EXPECT_TRUE(fs::exists(out / "report.csv"));
  EXPECT_TRUE(fs::exists(out / "changes.csv"));

  // evaluating the written merged files reproduces the in-memory reports
  std::vector<MergedRow> rows;
  for (int f = 1; f <= 3; ++f) {
    auto part = read_merged_file(out / merged_filename(f));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  EXPECT_EQ(evaluate_rows(rows), reports);
  fs::remove_all(out);
}

TEST(Pipeline, ByteIdenticalAcrossRunsAndThreadCounts) {
  const auto rs = corpus(5);
  const auto a = scratch("det_a"), b = scratch("det_b");
  run_pipeline(rs, {}, a);
  ::setenv("FUSELECT_THREADS", "1", 1);
  run_pipeline(rs, {}, b);
  ::unsetenv("FUSELECT_THREADS");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
    ++files;
  }
  EXPECT_EQ(files, 5u * 3u + 2u);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Pipeline, PlantedCorpusImprovesEveryMetric) {
  const auto out = scratch("lift");
  const auto reports = run_pipeline(corpus(5, 3, 5000), {}, out);
  const auto avg = average_folds(reports);
  EXPECT_GT(avg.after.wa, avg.before.wa);
  EXPECT_GT(avg.after.ua, avg.before.ua);
  EXPECT_GT(avg.after.f1, avg.before.f1);
  fs::remove_all(out);
}

TEST(Pipeline, ConfigOverridesReachArtifact) {
  PipelineConfig c;
  c.delta = 4;
  c.step = 2;
  c.tau_m_step = 0.1;
  const auto a = calibrate_on(corpus(1), 1, c);
  EXPECT_EQ(a.meta.delta_percentile, 4);
  EXPECT_EQ(a.meta.step_percentile, 2);
  EXPECT_EQ(a.meta.tau_m_step, 0.1);
}

TEST(ParallelFor, RunsEveryIndexAndPropagatesFirstError) {
  std::vector<int> hit(100, 0);
  parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
  try {
    parallel_for(50, [](std::size_t i) {
      if (i == 7 || i == 30) throw InputError("at " + std::to_string(i));
    });
    FAIL();
  } catch (const InputError& e) {
    EXPECT_STREQ(e.what(), "at 7");
  }
}
