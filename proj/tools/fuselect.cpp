// fuselect: calibrate, apply and evaluate entropy-aware score selection on
// fold-tagged score files.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fuselect.hpp"

namespace fs = std::filesystem;
using namespace fuselect;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

struct Options {
  std::string scores;
  std::string config;
  std::string out;
  std::string folds = "all";
  std::optional<int> delta;
  std::optional<int> step;
  std::optional<double> tau_m_step;
  std::optional<std::size_t> bins;
};

std::optional<std::vector<int>> parse_folds(const std::string& text) {
  if (text.empty() || text == "all") return std::nullopt;
  std::vector<int> out;
  for (auto item : csv::split(text)) {
    auto v = csv::to_int(item);
    if (!v || *v < 1) throw InputError("bad fold '" + std::string(item) + "' in --folds");
    out.push_back(static_cast<int>(*v));
  }
  return out;
}

/// Config file values first, then explicit flags on top.
PipelineConfig load_config(const Options& o) {
  PipelineConfig c;
  std::string folds = o.folds;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw InputError("cannot open config '" + o.config + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
      if (j.contains("delta")) c.delta = j["delta"].get<int>();
      if (j.contains("step")) c.step = j["step"].get<int>();
      if (j.contains("tau_m_step")) c.tau_m_step = j["tau_m_step"].get<double>();
      if (j.contains("bins")) c.bins = j["bins"].get<std::size_t>();
      if (j.contains("folds") && folds == "all") {
        if (j["folds"].is_string()) {
          folds = j["folds"].get<std::string>();
        } else {
          std::string joined;
          for (const auto& f : j["folds"]) joined += (joined.empty() ? "" : ",") + std::to_string(f.get<int>());
          folds = joined;
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError("bad config '" + o.config + "': " + e.what());
    }
  }
  if (o.delta) c.delta = *o.delta;
  if (o.step) c.step = *o.step;
  if (o.tau_m_step) c.tau_m_step = *o.tau_m_step;
  if (o.bins) c.bins = *o.bins;
  c.folds = parse_folds(folds);
  return c;
}

void add_search_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON config (delta, step, tau_m_step, folds, bins)");
  cmd->add_option("--folds", o.folds, "all or a comma-separated fold list");
  cmd->add_option("--delta", o.delta, "search envelope half-width, percentile points");
  cmd->add_option("--step", o.step, "grid step, percentile points");
  cmd->add_option("--tau-m-step", o.tau_m_step, "mapping threshold grid step");
}

int cmd_calibrate(const Options& o) {
  const auto config = load_config(o);
  const auto records = parse_score_file(o.scores);
  const auto artifacts = run_calibrate(records, config, o.out);
  for (const auto& [fold, a] : artifacts)
    std::cout << "fold " << fold << ": f_m=" << name(a.f_m) << " f_i=" << (a.f_i ? "true" : "false")
              << " exclusions=" << a.exclusion.size() << " -> "
              << (fs::path(o.out) / calib_filename(fold)).string() << '\n';
  return kExitOk;
}

int cmd_apply(const Options& o, const std::string& calib_path, std::optional<int> fold) {
  const auto records = parse_score_file(o.scores);
  const auto calib = read_calibration_file(calib_path);
  const int f = fold.value_or(calib.meta.created_from_fold);
  const auto applied = apply_on(records, calib, f);
  write_applied(applied, o.out);
  std::cout << "fold " << f << ": " << applied.log.records << " records, " << applied.log.triggered
            << " triggered, " << applied.log.changed << " changed, " << applied.log.reverted
            << " reverted\n";
  return kExitOk;
}

int cmd_evaluate(const std::vector<std::string>& files, const std::string& out) {
  std::vector<MergedRow> rows;
  for (const auto& path : files) {
    auto part = read_merged_file(path);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const auto reports = evaluate_rows(rows);
  if (!out.empty()) write_evaluation(reports, out);
  print_table(std::cout, reports);
  return kExitOk;
}

int cmd_diagnose(const Options& o, std::optional<int> fold, const std::string& split) {
  const auto config = load_config(o);
  const auto records = parse_score_file(o.scores);
  std::optional<Split> want;
  if (split != "all") {
    want = parse_split(split);
    if (!want) throw InputError("--split must be train, val, test or all");
  }
  Records chosen;
  for (const auto& r : records)
    if ((!fold || r.fold == *fold) && (!want || r.split == *want)) chosen.push_back(r);
  if (chosen.empty()) throw InputError("no records match the requested fold/split");

  const auto hists = diagnose(chosen, config.bins);
  std::ostringstream text;
  write_histograms(text, hists);
  fs::create_directories(o.out);
  const std::string file = fold ? "histograms_fold" + std::to_string(*fold) + ".csv" : "histograms.csv";
  std::ofstream(fs::path(o.out) / file, std::ios::binary) << text.str();
  for (const auto& h : hists)
    std::cout << name(h.cls) << ' ' << name(h.measure) << ": mean correct "
              << csv::fixed(h.mean_correct, 4) << ", mean incorrect " << csv::fixed(h.mean_incorrect, 4)
              << '\n';
  return kExitOk;
}

int cmd_synth(const std::string& out, synth::CorpusSpec spec, const std::string& mix) {
  if (!mix.empty()) spec.regime_mix = synth::parse_mix(mix);
  const auto corpus = synth::generate_corpus(spec);
  fs::create_directories(out);
  {
    std::ofstream f(fs::path(out) / "scores.csv", std::ios::binary);
    write_score_file(f, corpus.records);
  }
  {
    std::ofstream f(fs::path(out) / "planted.csv", std::ios::binary);
    synth::write_planted(f, corpus.planted);
  }
  std::cout << corpus.records.size() << " records -> " << (fs::path(out) / "scores.csv").string()
            << '\n';
  return kExitOk;
}

int cmd_pipeline(const Options& o) {
  const auto config = load_config(o);
  const auto records = parse_score_file(o.scores);
  const auto reports = run_pipeline(records, config, o.out);
  print_table(std::cout, reports);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-aware score selection: calibrate, merge and evaluate"};
  app.require_subcommand(1);
  Options o;

  auto* calibrate = app.add_subcommand("calibrate", "learn per-fold artifacts from train rows");
  calibrate->add_option("--scores", o.scores, "score file")->required();
  calibrate->add_option("--out", o.out, "output directory")->required();
  add_search_flags(calibrate, o);

  std::string calib_path;
  std::optional<int> fold;
  auto* apply = app.add_subcommand("apply", "merge the test rows of one fold");
  apply->add_option("--scores", o.scores, "score file")->required();
  apply->add_option("--calib", calib_path, "calibration artifact")->required();
  apply->add_option("--fold", fold, "fold (defaults to the artifact's fold)");
  apply->add_option("--out", o.out, "output directory")->required();

  std::vector<std::string> merged_files;
  auto* evaluate = app.add_subcommand("evaluate", "UA/WA/F1 before and after merging");
  evaluate->add_option("merged", merged_files, "merged prediction files")->required();
  evaluate->add_option("--out", o.out, "write report.csv and changes.csv here");

  std::string split = "all";
  auto* diag = app.add_subcommand("diagnose", "entropy/varentropy histograms by correctness");
  diag->add_option("--scores", o.scores, "score file")->required();
  diag->add_option("--out", o.out, "output directory")->required();
  diag->add_option("--fold", fold, "restrict to one fold");
  diag->add_option("--split", split, "train, val, test or all");
  diag->add_option("--bins", o.bins, "bins per histogram (default 30)");
  diag->add_option("--config", o.config, "JSON config");

  synth::CorpusSpec spec;
  std::string mix;
  auto* syn = app.add_subcommand("synth", "generate a synthetic score corpus");
  syn->add_option("--out", o.out, "output directory")->required();
  syn->add_option("--seed", spec.seed, "RNG seed");
  syn->add_option("--records", spec.n_records, "number of rows");
  syn->add_option("--n-folds", spec.folds, "number of folds");
  syn->add_option("--mix", mix, "regime=fraction,... (fractions sum to 1)");
  syn->add_option("--concentration-confident", spec.concentration_confident, "peak weight (> 1)");
  syn->add_option("--concentration-confused", spec.concentration_confused, "noise weight in (0, 1]");

  auto* pipe = app.add_subcommand("pipeline", "calibrate, apply and evaluate every fold");
  pipe->add_option("--scores", o.scores, "score file")->required();
  pipe->add_option("--out", o.out, "output directory")->required();
  add_search_flags(pipe, o);
  std::optional<std::uint64_t> unused_seed;
  pipe->add_option("--seed", unused_seed, "accepted for uniformity; the pipeline is deterministic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*calibrate) return cmd_calibrate(o);
    if (*apply) return cmd_apply(o, calib_path, fold);
    if (*evaluate) return cmd_evaluate(merged_files, o.out);
    if (*diag) return cmd_diagnose(o, fold, split);
    if (*syn) return cmd_synth(o.out, spec, mix);
    if (*pipe) return cmd_pipeline(o);
  } catch (const fuselect::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
