// Command line front end for the evochain pipeline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evochain/error.hpp"
#include "evochain/ged.hpp"
#include "evochain/pipeline.hpp"
#include "evochain/sgci.hpp"
#include "evochain/synth.hpp"
#include "evochain/tempnet.hpp"

namespace fs = std::filesystem;
using namespace evochain;

namespace {

constexpr const char* kSavedConfig = "config.json";

struct Overrides {
  std::string config;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  bool allow_stale = false;
  bool print_config = false;
  std::optional<std::size_t> threads;

  std::string method;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::optional<double> mj;
  std::optional<std::size_t> min_stability;
  std::optional<double> small_ratio;

  std::vector<std::size_t> chains;
  std::optional<double> sample_fraction;
  std::vector<std::string> classifiers;
  std::optional<std::size_t> folds;
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter:
    case ErrorKind::config:
      return 2;
    case ErrorKind::parse:
    case ErrorKind::integrity:
      return 3;
    case ErrorKind::resource:
    case ErrorKind::convergence:
      return 4;
  }
  return 1;
}

pipeline::PipelineConfig resolve_config(const Overrides& o) {
  pipeline::PipelineConfig config;
  if (!o.config.empty()) {
    config = pipeline::PipelineConfig::load(fs::absolute(o.config));
  } else {
    const fs::path saved = fs::path(o.output_dir.empty() ? config.output_dir : o.output_dir) / kSavedConfig;
    if (!fs::exists(saved)) {
      throw ConfigError("no --config given and no saved configuration at " + saved.string());
    }
    config = pipeline::PipelineConfig::load(saved);
  }
  if (!o.output_dir.empty()) config.output_dir = o.output_dir;
  if (o.seed) config.seed = *o.seed;
  if (!o.method.empty()) config.method = chains::method_from_string(o.method);
  if (!o.alpha.empty() || !o.beta.empty()) {
    const ged::Thresholds base = config.ged_thresholds.front();
    auto alphas = o.alpha.empty() ? std::vector<double>{base.alpha} : o.alpha;
    auto betas = o.beta.empty() ? std::vector<double>{base.beta} : o.beta;
    if (alphas.size() == 1) alphas.resize(betas.size(), alphas.front());
    if (betas.size() == 1) betas.resize(alphas.size(), betas.front());
    if (alphas.size() != betas.size()) throw ConfigError("--alpha and --beta lists differ in length");
    config.ged_thresholds.clear();
    for (std::size_t i = 0; i < alphas.size(); ++i) config.ged_thresholds.push_back({alphas[i], betas[i]});
  }
  if (o.mj) config.sgci.mj_threshold = *o.mj;
  if (o.min_stability) config.sgci.min_stability = *o.min_stability;
  if (o.small_ratio) config.sgci.small_ratio = *o.small_ratio;
  if (!o.chains.empty()) config.chain_lengths = o.chains;
  if (o.sample_fraction) config.chain_sample_fraction = *o.sample_fraction;
  if (!o.classifiers.empty()) {
    std::vector<learn::ModelParams> list;
    for (const auto& name : o.classifiers) {
      learn::ModelParams p;
      p.kind = learn::model_kind_from_string(name);
      for (const auto& existing : config.classifiers) {
        if (existing.kind == p.kind) {
          p = existing;
          break;
        }
      }
      list.push_back(p);
    }
    config.classifiers = list;
  }
  if (o.folds) config.cv_folds = *o.folds;
  for (auto& p : config.classifiers) p.seed = config.seed;
  if (!config.selection.chain_lengths.empty()) {
    std::erase_if(config.selection.chain_lengths, [&](std::size_t l) {
      return std::find(config.chain_lengths.begin(), config.chain_lengths.end(), l) == config.chain_lengths.end();
    });
  }
  config.validate();
  return config;
}

int run_synth(const std::string& scenario_path, const std::string& history, double noise, std::uint64_t seed,
              std::int64_t window_length, const std::string& out_dir) {
  synth::Scenario scenario;
  if (!history.empty()) {
    synth::HistoryOptions options;
    options.rule = synth::history_rule_from_string(history);
    options.noise = noise;
    scenario = synth::history_scenario(options, seed);
  } else {
    std::ifstream in(scenario_path);
    if (!in) throw ConfigError("cannot open scenario " + scenario_path);
    std::ostringstream text;
    text << in.rdbuf();
    scenario = synth::parse_scenario(text.str());
  }
  const auto generated = synth::generate(scenario, seed);
  std::ostringstream interactions;
  tempnet::write_interactions(interactions, synth::to_interactions(generated, window_length));
  std::ostringstream truth;
  if (scenario.taxonomy == synth::Taxonomy::ged) {
    for (const auto& e : generated.ged_truth) ged::write_event(truth, e);
  } else {
    sgci::write_labels(truth, generated.sgci_truth);
  }
  std::ostringstream script;
  synth::write_scenario(script, scenario);
  const fs::path out(out_dir);
  pipeline::write_atomic(out / "interactions.csv", interactions.str());
  pipeline::write_atomic(out / "truth_events.jsonl", truth.str());
  pipeline::write_atomic(out / "scenario.json", script.str());
  std::cout << "wrote " << generated.graphs.size() << " frames to " << out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evochain: group evolution tracking and next-event prediction"};
  app.require_subcommand(0, 0);
  Overrides o;

  app.add_option("--config", o.config, "Pipeline configuration (JSON)");
  app.add_option("--output-dir", o.output_dir, "Override the output directory");
  app.add_option("--seed", o.seed, "Override the master seed");
  app.add_flag("--allow-stale", o.allow_stale, "Proceed even when upstream artifacts are stale");
  app.add_flag("--print-effective-config", o.print_config, "Print the resolved configuration and exit");
  app.add_option("--threads", o.threads, "Worker pool size (default: EVOCHAIN_THREADS or 1)");
  app.add_option("--method", o.method, "Tracking method: ged or sgci");
  app.add_option("--alpha", o.alpha, "GED alpha threshold(s), percent")->delimiter(',');
  app.add_option("--beta", o.beta, "GED beta threshold(s), percent")->delimiter(',');
  app.add_option("--mj", o.mj, "SGCI matching threshold");
  app.add_option("--min-stability", o.min_stability, "SGCI minimal stable group length");
  app.add_option("--small-ratio", o.small_ratio, "SGCI small group ratio");
  app.add_option("--chains", o.chains, "Chain lengths, e.g. 2,3,4")->delimiter(',');
  app.add_option("--chain-sample-fraction", o.sample_fraction, "Stratified chain sampling fraction");
  app.add_option("--classifier", o.classifiers, "Classifier kind(s): tree, forest, adaboost, bagging")
      ->delimiter(',');
  app.add_option("--folds", o.folds, "Cross-validation folds");

  struct Stage {
    const char* name;
    const char* help;
    void (pipeline::Pipeline::*run)();
  };
  const std::vector<Stage> stages = {
      {"slice", "Slice interactions into snapshot graphs", &pipeline::Pipeline::slice},
      {"detect", "Detect communities per snapshot", &pipeline::Pipeline::detect},
      {"track", "Track group evolution events", &pipeline::Pipeline::track},
      {"chains", "Build evolution chains", &pipeline::Pipeline::chains},
      {"featurize", "Compute group profiles and chain datasets", &pipeline::Pipeline::featurize},
      {"evaluate", "Cross-validate classifiers", &pipeline::Pipeline::evaluate},
      {"select", "Backward feature elimination", &pipeline::Pipeline::select},
      {"report", "F-measure tables and plot", &pipeline::Pipeline::report},
      {"run-all", "Run every stage in order", &pipeline::Pipeline::run_all},
  };
  for (const auto& s : stages) app.add_subcommand(s.name, s.help)->fallthrough();

  std::string scenario_path;
  std::string history;
  double history_noise = 0.0;
  std::int64_t window_length = 100;
  std::string synth_out = "synth-out";
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scenario with ground truth");
  synth_cmd->fallthrough();
  auto* scenario_opt = synth_cmd->add_option("--scenario", scenario_path, "Scenario script (JSON)");
  synth_cmd->add_option("--history", history, "History rule: cycle, shrink_shrink_grow or memoryless")
      ->excludes(scenario_opt);
  synth_cmd->add_option("--noise", history_noise, "Share of history events drawn at random");
  synth_cmd->add_option("--window-length", window_length, "Timestamp spacing between frames");
  synth_cmd->add_option("--out", synth_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed()) {
      if (app.get_subcommands().size() > 1) throw ConfigError("synth cannot be combined with pipeline stages");
      if (scenario_path.empty() && history.empty()) throw ConfigError("synth needs --scenario or --history");
      return run_synth(scenario_path, history, history_noise, o.seed.value_or(1), window_length, synth_out);
    }
    const auto config = resolve_config(o);
    if (o.print_config) {
      std::cout << config.to_json() << '\n';
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return 2;
    }
    pipeline::RunOptions options;
    options.allow_stale = o.allow_stale;
    options.threads = o.threads.value_or(pipeline::threads_from_env());
    pipeline::Pipeline runner(config, options);
    pipeline::write_atomic(fs::path(config.output_dir) / kSavedConfig, config.to_json() + "\n");
    for (const auto& s : stages) {
      if (app.got_subcommand(s.name)) (runner.*s.run)();
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "evochain: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "evochain: " << e.what() << '\n';
    return 1;
  }
}
