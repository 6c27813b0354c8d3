#include "evochain/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "evochain/cpm.hpp"
#include "evochain/dataset.hpp"
#include "evochain/error.hpp"
#include "evochain/learn/evaluation.hpp"
#include "evochain/learn/selection.hpp"
#include "evochain/metrics.hpp"
#include "evochain/random.hpp"
#include "evochain/tempnet.hpp"
#include "format.hpp"
#include "json.hpp"

namespace evochain::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::set<std::string> kTopKeys = {
    "input",   "synth",        "window",         "directed",    "cpm_k",     "max_cliques",
    "method",  "ged",          "sgci",           "social_position_epsilon", "cohesion_cap",
    "chain_lengths", "chain_sample_fraction", "classifiers", "cv_folds", "global_normalization",
    "seed",    "selection",    "output_dir"};

void check_keys(const json& object, const std::set<std::string>& allowed, const std::string& where) {
  if (!object.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : object.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const json& object, const char* key, T fallback, const std::string& where) {
  if (!object.contains(key)) return fallback;
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("invalid value for '" + std::string(key) + "' in " + where);
  }
}

learn::ModelParams classifier_from_json(const json& entry) {
  learn::ModelParams p;
  if (entry.is_string()) {
    p.kind = learn::model_kind_from_string(entry.get<std::string>());
    return p;
  }
  check_keys(entry, {"kind", "n_trees", "mtry", "n_rounds", "n_bags", "max_depth", "min_leaf", "use_gain_ratio"},
             "classifier");
  if (!entry.contains("kind")) throw ConfigError("classifier entries need a 'kind'");
  const std::string where = "classifier";
  p.kind = learn::model_kind_from_string(entry.at("kind").get<std::string>());
  p.n_trees = get(entry, "n_trees", p.n_trees, where);
  p.mtry = get(entry, "mtry", p.mtry, where);
  p.n_rounds = get(entry, "n_rounds", p.n_rounds, where);
  p.n_bags = get(entry, "n_bags", p.n_bags, where);
  p.tree.max_depth = get(entry, "max_depth", p.tree.max_depth, where);
  p.tree.min_leaf = get(entry, "min_leaf", p.tree.min_leaf, where);
  p.tree.use_gain_ratio = get(entry, "use_gain_ratio", p.tree.use_gain_ratio, where);
  return p;
}

ordered_json classifier_to_json(const learn::ModelParams& p) {
  return {{"kind", std::string(learn::to_string(p.kind))},
          {"max_depth", p.tree.max_depth},
          {"min_leaf", p.tree.min_leaf},
          {"use_gain_ratio", p.tree.use_gain_ratio},
          {"n_trees", p.n_trees},
          {"mtry", p.mtry},
          {"n_rounds", p.n_rounds},
          {"n_bags", p.n_bags}};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IntegrityError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string hash_json(const json& value) { return to_hex(fnv1a64(value.dump())); }

std::string number(double value) { return detail::format_number(value); }

std::string length_dir(std::size_t length) { return "L" + std::to_string(length); }

/// Splits "a/b/c" into parts.
std::vector<std::string> split_cell(std::string_view cell) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= cell.size()) {
    const auto slash = cell.find('/', start);
    const auto end = slash == std::string_view::npos ? cell.size() : slash;
    parts.emplace_back(cell.substr(start, end - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return parts;
}

std::string body_of(std::istream& in) {
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '#') continue;
    out << line << '\n';
  }
  return out.str();
}

chains::ProfileTable parse_profiles(const std::string& text) {
  chains::ProfileTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= line.size()) {
      auto comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + start, line.data() + comma, v);
      if (ec != std::errc() || ptr != line.data() + comma) throw ParseError(line_no, "invalid profile value");
      values.push_back(v);
      start = comma + 1;
      if (comma == line.size()) break;
    }
    if (values.size() != 2 + metrics::kSgciFeatureCount) throw ParseError(line_no, "wrong profile width");
    GroupRef ref{static_cast<std::size_t>(values[0]), static_cast<std::size_t>(values[1])};
    table[ref] = std::vector<double>(values.begin() + 2, values.end());
  }
  return table;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

PipelineConfig::PipelineConfig() {
  learn::ModelParams forest;
  forest.kind = learn::ModelKind::forest;
  classifiers.push_back(forest);
}

PipelineConfig PipelineConfig::from_json(std::string_view text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  check_keys(doc, kTopKeys, "configuration");
  const std::string top = "configuration";
  auto resolve = [&](const std::string& p) {
    if (p.empty() || base_dir.empty() || fs::path(p).is_absolute()) return p;
    return (base_dir / p).lexically_normal().string();
  };

  PipelineConfig c;
  c.input = resolve(get(doc, "input", std::string(), top));
  if (doc.contains("synth")) {
    const auto& s = doc.at("synth");
    check_keys(s, {"scenario", "history", "seed", "window_length", "bypass_detection"}, "synth");
    c.synth.enabled = true;
    if (s.contains("scenario")) {
      if (s.at("scenario").is_string()) {
        c.synth.scenario_path = resolve(s.at("scenario").get<std::string>());
      } else {
        c.synth.scenario_text = s.at("scenario").dump();
      }
    }
    if (s.contains("history")) {
      const auto& h = s.at("history");
      check_keys(h, {"rule", "groups", "frames", "min_size", "max_size", "min_step", "max_step", "p_in", "p_out",
                     "noise"},
                 "synth.history");
      synth::HistoryOptions o;
      o.rule = synth::history_rule_from_string(get(h, "rule", std::string("cycle"), "synth.history"));
      o.groups = get(h, "groups", o.groups, "synth.history");
      o.frames = get(h, "frames", o.frames, "synth.history");
      o.min_size = get(h, "min_size", o.min_size, "synth.history");
      o.max_size = get(h, "max_size", o.max_size, "synth.history");
      o.min_step = get(h, "min_step", o.min_step, "synth.history");
      o.max_step = get(h, "max_step", o.max_step, "synth.history");
      o.p_in = get(h, "p_in", o.p_in, "synth.history");
      o.p_out = get(h, "p_out", o.p_out, "synth.history");
      o.noise = get(h, "noise", o.noise, "synth.history");
      c.synth.history = o;
    }
    c.synth.seed = get(s, "seed", c.synth.seed, "synth");
    c.synth.window_length = get(s, "window_length", c.synth.window_length, "synth");
    c.synth.bypass_detection = get(s, "bypass_detection", c.synth.bypass_detection, "synth");
  }
  if (doc.contains("window")) {
    const auto& w = doc.at("window");
    check_keys(w, {"span_start", "span_end", "length", "step"}, "window");
    if (w.contains("span_start")) c.window.span_start = get(w, "span_start", std::int64_t{0}, "window");
    if (w.contains("span_end")) c.window.span_end = get(w, "span_end", std::int64_t{0}, "window");
    c.window.length = get(w, "length", c.window.length, "window");
    c.window.step = get(w, "step", c.window.step, "window");
  }
  c.directed = get(doc, "directed", c.directed, top);
  c.cpm_k = get(doc, "cpm_k", c.cpm_k, top);
  c.max_cliques = get(doc, "max_cliques", c.max_cliques, top);
  if (doc.contains("method")) c.method = chains::method_from_string(get(doc, "method", std::string(), top));
  if (doc.contains("ged")) {
    const auto& g = doc.at("ged");
    check_keys(g, {"thresholds", "alpha", "beta", "combinations"}, "ged");
    c.ged_thresholds.clear();
    if (g.contains("thresholds")) {
      for (const auto& t : g.at("thresholds")) {
        check_keys(t, {"alpha", "beta"}, "ged.thresholds");
        c.ged_thresholds.push_back({get(t, "alpha", 50.0, "ged.thresholds"), get(t, "beta", 50.0, "ged.thresholds")});
      }
    }
    if (g.contains("alpha") || g.contains("beta")) {
      auto alphas = get(g, "alpha", std::vector<double>{50.0}, "ged");
      auto betas = get(g, "beta", alphas, "ged");
      const auto mode = get(g, "combinations", std::string("joint"), "ged");
      if (mode == "joint") {
        // A single value pairs with every entry of the other list.
        if (alphas.size() == 1) alphas.resize(betas.size(), alphas.front());
        if (betas.size() == 1) betas.resize(alphas.size(), betas.front());
        if (alphas.size() != betas.size()) throw ConfigError("joint GED sweeps need equally long alpha and beta lists");
        for (std::size_t i = 0; i < alphas.size(); ++i) c.ged_thresholds.push_back({alphas[i], betas[i]});
      } else if (mode == "all") {
        for (double a : alphas) {
          for (double b : betas) c.ged_thresholds.push_back({a, b});
        }
      } else {
        throw ConfigError("ged.combinations must be 'joint' or 'all'");
      }
    }
    if (c.ged_thresholds.empty()) c.ged_thresholds.push_back({});
  }
  if (doc.contains("sgci")) {
    const auto& s = doc.at("sgci");
    check_keys(s, {"mj_threshold", "min_stability", "small_ratio"}, "sgci");
    c.sgci.mj_threshold = get(s, "mj_threshold", c.sgci.mj_threshold, "sgci");
    c.sgci.min_stability = get(s, "min_stability", c.sgci.min_stability, "sgci");
    c.sgci.small_ratio = get(s, "small_ratio", c.sgci.small_ratio, "sgci");
  }
  c.social_position_epsilon = get(doc, "social_position_epsilon", c.social_position_epsilon, top);
  c.cohesion_cap = get(doc, "cohesion_cap", c.cohesion_cap, top);
  c.chain_lengths = get(doc, "chain_lengths", c.chain_lengths, top);
  c.chain_sample_fraction = get(doc, "chain_sample_fraction", c.chain_sample_fraction, top);
  if (doc.contains("classifiers")) {
    c.classifiers.clear();
    const auto& list = doc.at("classifiers");
    if (!list.is_array()) throw ConfigError("classifiers must be a list");
    for (const auto& entry : list) c.classifiers.push_back(classifier_from_json(entry));
  }
  c.cv_folds = get(doc, "cv_folds", c.cv_folds, top);
  c.global_normalization = get(doc, "global_normalization", c.global_normalization, top);
  c.seed = get(doc, "seed", c.seed, top);
  if (doc.contains("selection")) {
    const auto& s = doc.at("selection");
    check_keys(s, {"enabled", "epsilon", "chain_lengths"}, "selection");
    c.selection.enabled = get(s, "enabled", true, "selection");
    c.selection.epsilon = get(s, "epsilon", c.selection.epsilon, "selection");
    c.selection.chain_lengths = get(s, "chain_lengths", c.selection.chain_lengths, "selection");
  }
  c.output_dir = get(doc, "output_dir", c.output_dir, top);
  for (auto& p : c.classifiers) p.seed = c.seed;
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str(), path.parent_path());
}

std::string PipelineConfig::to_json() const {
  ordered_json doc;
  doc["input"] = input;
  if (synth.enabled) {
    ordered_json s;
    if (!synth.scenario_path.empty()) s["scenario"] = synth.scenario_path;
    if (!synth.scenario_text.empty()) s["scenario"] = ordered_json::parse(synth.scenario_text);
    if (synth.history) {
      const auto& h = *synth.history;
      s["history"] = {{"rule", std::string(synth::to_string(h.rule))},
                      {"groups", h.groups},
                      {"frames", h.frames},
                      {"min_size", h.min_size},
                      {"max_size", h.max_size},
                      {"min_step", h.min_step},
                      {"max_step", h.max_step},
                      {"p_in", h.p_in},
                      {"p_out", h.p_out},
                      {"noise", h.noise}};
    }
    s["seed"] = synth.seed;
    s["window_length"] = synth.window_length;
    s["bypass_detection"] = synth.bypass_detection;
    doc["synth"] = s;
  }
  ordered_json w;
  if (window.span_start) w["span_start"] = *window.span_start;
  if (window.span_end) w["span_end"] = *window.span_end;
  w["length"] = window.length;
  w["step"] = window.step;
  doc["window"] = w;
  doc["directed"] = directed;
  doc["cpm_k"] = cpm_k;
  doc["max_cliques"] = max_cliques;
  doc["method"] = std::string(chains::to_string(method));
  ordered_json thresholds = ordered_json::array();
  for (const auto& t : ged_thresholds) thresholds.push_back({{"alpha", t.alpha}, {"beta", t.beta}});
  doc["ged"] = {{"thresholds", thresholds}};
  doc["sgci"] = {{"mj_threshold", sgci.mj_threshold},
                 {"min_stability", sgci.min_stability},
                 {"small_ratio", sgci.small_ratio}};
  doc["social_position_epsilon"] = social_position_epsilon;
  doc["cohesion_cap"] = cohesion_cap;
  doc["chain_lengths"] = chain_lengths;
  doc["chain_sample_fraction"] = chain_sample_fraction;
  ordered_json list = ordered_json::array();
  for (const auto& p : classifiers) list.push_back(classifier_to_json(p));
  doc["classifiers"] = list;
  doc["cv_folds"] = cv_folds;
  doc["global_normalization"] = global_normalization;
  doc["seed"] = seed;
  doc["selection"] = {{"enabled", selection.enabled},
                      {"epsilon", selection.epsilon},
                      {"chain_lengths", selection.chain_lengths}};
  doc["output_dir"] = output_dir;
  return doc.dump(2);
}

void PipelineConfig::validate() const {
  if (input.empty() && !synth.enabled) throw ConfigError("either 'input' or 'synth' is required");
  if (!input.empty() && synth.enabled) throw ConfigError("'input' and 'synth' are mutually exclusive");
  if (synth.enabled) {
    const int sources = !synth.scenario_path.empty() + !synth.scenario_text.empty() + synth.history.has_value();
    if (sources != 1) throw ConfigError("synth needs exactly one of 'scenario' or 'history'");
    if (synth.window_length <= 0) throw ConfigError("synth.window_length must be positive");
  } else {
    if (window.length <= 0) throw ConfigError("window.length must be positive");
    if (window.step < 0 || window.step > window.length) throw ConfigError("window.step must lie in (0, length]");
  }
  if (cpm_k < 3) throw ConfigError("cpm_k must be at least 3");
  if (max_cliques == 0) throw ConfigError("max_cliques must be positive");
  try {
    for (const auto& t : ged_thresholds) t.validate();
    sgci.validate();
    for (const auto& p : classifiers) p.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (!(social_position_epsilon > 0.0 && social_position_epsilon < 1.0)) {
    throw ConfigError("social_position_epsilon must lie in (0, 1)");
  }
  if (!(cohesion_cap > 0.0)) throw ConfigError("cohesion_cap must be positive");
  if (chain_lengths.empty()) throw ConfigError("chain_lengths must not be empty");
  for (std::size_t l : chain_lengths) {
    if (l < 2) throw ConfigError("chain lengths must be at least 2");
  }
  for (std::size_t l : selection.chain_lengths) {
    if (std::find(chain_lengths.begin(), chain_lengths.end(), l) == chain_lengths.end()) {
      throw ConfigError("selection chain length " + std::to_string(l) + " is not among chain_lengths");
    }
  }
  if (!(chain_sample_fraction > 0.0 && chain_sample_fraction <= 1.0)) {
    throw ConfigError("chain_sample_fraction must lie in (0, 1]");
  }
  if (classifiers.empty()) throw ConfigError("at least one classifier is required");
  if (cv_folds < 2) throw ConfigError("cv_folds must be at least 2");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

// ---------------------------------------------------------------------------
// Utilities

std::size_t threads_from_env() {
  const char* value = std::getenv("EVOCHAIN_THREADS");
  if (value == nullptr || *value == '\0') return 1;
  std::size_t n = 0;
  const std::string_view text(value);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc() || ptr != text.data() + text.size() || n == 0) {
    throw ConfigError("EVOCHAIN_THREADS must be a positive integer");
  }
  return n;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  threads = std::clamp<std::size_t>(threads, 1, n);
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void write_atomic(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IntegrityError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IntegrityError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Stages

namespace {

struct Inputs {
  std::vector<tempnet::Snapshot> snapshots;
};

synth::Scenario load_scenario(const SynthConfig& s) {
  if (s.history) return synth::history_scenario(*s.history, s.seed);
  if (!s.scenario_text.empty()) return synth::parse_scenario(s.scenario_text);
  return synth::parse_scenario(read_file(s.scenario_path));
}

std::string track_cell_name(const PipelineConfig& c, std::size_t index) {
  if (c.method == chains::Method::ged) {
    const auto& t = c.ged_thresholds[index];
    return "ged_a" + number(t.alpha) + "_b" + number(t.beta);
  }
  return "sgci_mj" + number(c.sgci.mj_threshold) + "_s" + std::to_string(c.sgci.min_stability) + "_r" +
         number(c.sgci.small_ratio);
}

}  // namespace

Pipeline::Pipeline(PipelineConfig config, RunOptions options)
    : config_(std::move(config)), options_(options) {
  config_.validate();
  if (options_.threads == 0) options_.threads = 1;
}

std::vector<std::string> Pipeline::track_cells() const {
  std::vector<std::string> cells;
  const std::size_t n = config_.method == chains::Method::ged ? config_.ged_thresholds.size() : 1;
  for (std::size_t i = 0; i < n; ++i) {
    auto name = track_cell_name(config_, i);
    if (std::find(cells.begin(), cells.end(), name) != cells.end()) {
      throw ConfigError("duplicate tracking sweep cell " + name);
    }
    cells.push_back(std::move(name));
  }
  return cells;
}

std::vector<std::string> Pipeline::classifier_cells() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& p : config_.classifiers) ++counts[std::string(learn::to_string(p.kind))];
  std::vector<std::string> cells;
  for (std::size_t i = 0; i < config_.classifiers.size(); ++i) {
    std::string kind(learn::to_string(config_.classifiers[i].kind));
    cells.push_back(counts[kind] > 1 ? kind + "_" + std::to_string(i) : kind);
  }
  return cells;
}

std::string Pipeline::stage_hash(std::string_view stage, std::string_view cell) const {
  const auto& c = config_;
  const auto parts = split_cell(cell);
  auto part = [&](std::size_t i) -> const std::string& {
    if (i >= parts.size() || parts[i].empty()) {
      throw ParameterError("stage " + std::string(stage) + " needs a cell like track/L<n>/classifier");
    }
    return parts[i];
  };
  auto length_of = [&](const std::string& text) -> std::size_t {
    if (text.size() < 2 || text[0] != 'L') throw ParameterError("bad chain length cell '" + text + "'");
    return static_cast<std::size_t>(std::stoul(text.substr(1)));
  };
  auto classifier_of = [&](const std::string& name) -> const learn::ModelParams& {
    const auto names = classifier_cells();
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw ParameterError("unknown classifier cell '" + name + "'");
    return c.classifiers[static_cast<std::size_t>(it - names.begin())];
  };

  json doc;
  doc["stage"] = std::string(stage);
  if (stage == "slice") {
    if (c.synth.enabled) {
      ordered_json s = ordered_json::parse(c.to_json()).at("synth");
      s.erase("bypass_detection");
      if (!c.synth.scenario_path.empty()) s["scenario"] = to_hex(fnv1a64(read_file(c.synth.scenario_path)));
      doc["synth"] = json::parse(s.dump());
    } else {
      doc["input"] = to_hex(fnv1a64(read_file(c.input)));
      doc["window"] = {{"span_start", c.window.span_start ? json(*c.window.span_start) : json(nullptr)},
                       {"span_end", c.window.span_end ? json(*c.window.span_end) : json(nullptr)},
                       {"length", c.window.length},
                       {"step", c.window.step}};
    }
    doc["directed"] = c.directed;
  } else if (stage == "detect") {
    doc["upstream"] = stage_hash("slice");
    doc["bypass"] = c.synth.enabled && c.synth.bypass_detection;
    doc["cpm_k"] = c.cpm_k;
    doc["max_cliques"] = c.max_cliques;
  } else if (stage == "profiles") {
    doc["upstream"] = stage_hash("detect");
    doc["epsilon"] = c.social_position_epsilon;
    doc["cohesion_cap"] = c.cohesion_cap;
  } else if (stage == "track") {
    doc["upstream"] = stage_hash("detect");
    doc["cell"] = part(0);
    doc["method"] = std::string(chains::to_string(c.method));
    if (c.method == chains::Method::ged) {
      const auto cells = track_cells();
      auto it = std::find(cells.begin(), cells.end(), part(0));
      if (it == cells.end()) throw ParameterError("unknown tracking cell '" + part(0) + "'");
      const auto& t = c.ged_thresholds[static_cast<std::size_t>(it - cells.begin())];
      doc["alpha"] = t.alpha;
      doc["beta"] = t.beta;
      doc["epsilon"] = c.social_position_epsilon;
    } else {
      doc["mj"] = c.sgci.mj_threshold;
      doc["min_stability"] = c.sgci.min_stability;
      doc["small_ratio"] = c.sgci.small_ratio;
    }
  } else if (stage == "chains") {
    doc["upstream"] = stage_hash("track", part(0));
    doc["length"] = length_of(part(1));
    doc["fraction"] = c.chain_sample_fraction;
    doc["seed"] = c.seed;
  } else if (stage == "featurize") {
    doc["upstream"] = stage_hash("chains", std::string(part(0)) + "/" + part(1));
    doc["profiles"] = stage_hash("profiles");
  } else if (stage == "evaluate" || stage == "select") {
    doc["upstream"] = stage_hash("featurize", std::string(part(0)) + "/" + part(1));
    doc["classifier"] = json::parse(classifier_to_json(classifier_of(part(2))).dump());
    doc["folds"] = c.cv_folds;
    doc["seed"] = c.seed;
    doc["global_normalization"] = c.global_normalization;
    if (stage == "select") doc["epsilon"] = c.selection.epsilon;
  } else if (stage == "report") {
    json upstream = json::array();
    for (const auto& tc : track_cells()) {
      for (std::size_t l : c.chain_lengths) {
        for (const auto& clf : classifier_cells()) {
          upstream.push_back(stage_hash("evaluate", tc + "/" + length_dir(l) + "/" + clf));
        }
      }
    }
    doc["upstream"] = upstream;
  } else {
    throw ParameterError("unknown stage '" + std::string(stage) + "'");
  }
  return hash_json(doc);
}

fs::path Pipeline::dir(std::string_view stage) const { return fs::path(config_.output_dir) / std::string(stage); }

std::string Pipeline::header(std::string_view stage, std::string_view cell, std::string_view upstream) const {
  std::string line = "# evochain stage=" + std::string(stage);
  if (!cell.empty()) line += " cell=" + std::string(cell);
  line += " hash=" + stage_hash(stage == "profiles" ? "profiles" : stage, cell);
  if (!upstream.empty()) line += " upstream=" + std::string(upstream);
  line += " seed=" + std::to_string(config_.seed) + "\n";
  return line;
}

std::string Pipeline::read_checked(const fs::path& path, const std::string& expected_hash) const {
  if (!fs::exists(path)) {
    throw IntegrityError("missing upstream artifact " + path.string() + "; run the earlier stage first");
  }
  std::ifstream in(path, std::ios::binary);
  std::string first;
  std::getline(in, first);
  const auto pos = first.find(" hash=");
  const std::string found = pos == std::string::npos ? "" : first.substr(pos + 6, 16);
  if (found != expected_hash && !options_.allow_stale) {
    throw IntegrityError("stale artifact " + path.string() + ": written with hash " +
                         (found.empty() ? std::string("<none>") : found) + " but the current configuration expects " +
                         expected_hash + "; rerun the upstream stage or pass --allow-stale");
  }
  return body_of(in);
}

namespace {

std::vector<tempnet::Snapshot> parse_snapshots(const std::string& body) {
  std::istringstream in(body);
  return tempnet::read_snapshots(in);
}

std::vector<std::vector<Community>> parse_frames(const std::string& body, std::size_t frames) {
  std::istringstream in(body);
  auto communities = cpm::read_communities(in);
  return cpm::by_frame(communities, frames);
}

}  // namespace

void Pipeline::slice() {
  std::vector<tempnet::Snapshot> snapshots;
  std::string truth;
  if (config_.synth.enabled) {
    const auto scenario = load_scenario(config_.synth);
    const auto generated = synth::generate(scenario, config_.synth.seed, config_.sgci);
    const auto log = synth::to_interactions(generated, config_.synth.window_length);
    const std::int64_t w = config_.synth.window_length;
    const tempnet::WindowSpec spec{0, static_cast<std::int64_t>(generated.graphs.size()) * w, w, w};
    for (const auto& frame : tempnet::slice_windows(spec)) {
      snapshots.push_back(tempnet::build_snapshot(frame, log, config_.directed));
    }
    std::ostringstream out;
    if (scenario.taxonomy == synth::Taxonomy::ged) {
      for (const auto& e : generated.ged_truth) ged::write_event(out, e);
    } else {
      sgci::write_labels(out, generated.sgci_truth);
    }
    truth = out.str();
    std::ostringstream scenario_out;
    synth::write_scenario(scenario_out, scenario);
    write_atomic(dir("slice") / "scenario.json", scenario_out.str());
    std::ostringstream communities;
    for (const auto& frame : generated.communities) cpm::write_communities(communities, frame);
    write_atomic(dir("slice") / "planted_communities.jsonl", header("slice", "", "") + communities.str());
  } else {
    std::ifstream in(config_.input, std::ios::binary);
    if (!in) throw ConfigError("cannot open input " + config_.input);
    const auto log = tempnet::parse_interactions(in);
    if (log.empty() && (!config_.window.span_start || !config_.window.span_end)) {
      throw ParseError(0, "input has no interactions");
    }
    tempnet::WindowSpec spec;
    spec.span_start = config_.window.span_start.value_or(log.empty() ? 0 : log.records().front().timestamp);
    spec.span_end = config_.window.span_end.value_or(log.empty() ? 0 : log.records().back().timestamp + 1);
    spec.window_length = config_.window.length;
    spec.step = config_.window.step == 0 ? config_.window.length : config_.window.step;
    const auto frames = tempnet::slice_windows(spec);
    snapshots.resize(frames.size());
    parallel_for(frames.size(), options_.threads, [&](std::size_t i) {
      snapshots[i] = tempnet::build_snapshot(frames[i], log, config_.directed);
    });
  }
  std::ostringstream out;
  out << header("slice", "", "");
  for (const auto& s : snapshots) tempnet::write_snapshot(out, s);
  write_atomic(dir("slice") / "snapshots.jsonl", out.str());
  if (!truth.empty()) write_atomic(dir("slice") / "truth_events.jsonl", header("slice", "", "") + truth);
}

void Pipeline::detect() {
  const std::string upstream = stage_hash("slice");
  const auto snapshots = parse_snapshots(read_checked(dir("slice") / "snapshots.jsonl", upstream));
  std::vector<std::vector<Community>> frames(snapshots.size());
  if (config_.synth.enabled && config_.synth.bypass_detection) {
    frames = parse_frames(read_checked(dir("slice") / "planted_communities.jsonl", upstream), snapshots.size());
  } else {
    cpm::CliqueOptions options;
    options.max_cliques = config_.max_cliques;
    parallel_for(snapshots.size(), options_.threads, [&](std::size_t i) {
      frames[i] = cpm::detect_communities(snapshots[i].graph, config_.cpm_k, i, options);
    });
  }
  std::ostringstream out;
  out << header("detect", "", upstream);
  for (const auto& f : frames) cpm::write_communities(out, f);
  write_atomic(dir("detect") / "communities.jsonl", out.str());
}

void Pipeline::track() {
  const std::string slice_hash = stage_hash("slice");
  const std::string detect_hash = stage_hash("detect");
  const auto snapshots = parse_snapshots(read_checked(dir("slice") / "snapshots.jsonl", slice_hash));
  const auto frames = parse_frames(read_checked(dir("detect") / "communities.jsonl", detect_hash), snapshots.size());
  const auto cells = track_cells();

  if (config_.method == chains::Method::ged) {
    std::vector<ged::Importance> importance(snapshots.size());
    parallel_for(snapshots.size(), options_.threads, [&](std::size_t i) {
      const auto sp = metrics::social_position(snapshots[i].graph, config_.social_position_epsilon);
      importance[i] = ged::importance_from_scores(snapshots[i].graph, sp);
    });
    parallel_for(cells.size(), options_.threads, [&](std::size_t c) {
      const auto events = ged::detect_events(frames, importance, config_.ged_thresholds[c]);
      std::ostringstream out;
      out << header("track", cells[c], detect_hash);
      for (const auto& e : events) ged::write_event(out, e);
      write_atomic(dir("track") / cells[c] / "events.jsonl", out.str());
    });
  } else {
    const auto result = sgci::detect_events(frames, config_.sgci);
    std::ostringstream events;
    events << header("track", cells[0], detect_hash);
    sgci::write_labels(events, result.labels);
    write_atomic(dir("track") / cells[0] / "events.jsonl", events.str());
    std::ostringstream stable;
    stable << header("track", cells[0], detect_hash);
    sgci::write_stable(stable, result.stable);
    write_atomic(dir("track") / cells[0] / "stable.jsonl", stable.str());
  }
}

void Pipeline::chains() {
  const auto cells = track_cells();
  const auto& lengths = config_.chain_lengths;
  parallel_for(cells.size() * lengths.size(), options_.threads, [&](std::size_t i) {
    const auto& cell = cells[i / lengths.size()];
    const std::size_t length = lengths[i % lengths.size()];
    const std::string upstream = stage_hash("track", cell);
    chains::TransitionGraph graph;
    std::istringstream events(read_checked(dir("track") / cell / "events.jsonl", upstream));
    if (config_.method == chains::Method::ged) {
      graph = chains::from_ged(ged::read_events(events));
    } else {
      std::istringstream stable(read_checked(dir("track") / cell / "stable.jsonl", upstream));
      graph = chains::from_sgci(sgci::read_stable(stable), sgci::read_labels(events));
    }
    auto built = chains::build_chains(graph, length);
    if (config_.chain_sample_fraction < 1.0) {
      built = chains::sample_chains(built, config_.chain_sample_fraction, derive_seed(config_.seed, length));
    }
    const std::string key = cell + "/" + length_dir(length);
    std::ostringstream out;
    out << header("chains", key, upstream);
    chains::write_chains(out, built);
    write_atomic(dir("chains") / cell / length_dir(length) / "chains.jsonl", out.str());
  });
}

void Pipeline::featurize() {
  const std::string slice_hash = stage_hash("slice");
  const std::string detect_hash = stage_hash("detect");
  const auto snapshots = parse_snapshots(read_checked(dir("slice") / "snapshots.jsonl", slice_hash));
  const auto frames = parse_frames(read_checked(dir("detect") / "communities.jsonl", detect_hash), snapshots.size());

  std::vector<std::string> rows(snapshots.size());
  metrics::ScoreOptions score_options;
  score_options.social_position_epsilon = config_.social_position_epsilon;
  metrics::ProfileOptions profile_options;
  profile_options.cohesion_cap = config_.cohesion_cap;
  parallel_for(snapshots.size(), options_.threads, [&](std::size_t f) {
    const auto& graph = snapshots[f].graph;
    const auto scores = metrics::compute_node_scores(graph, score_options);
    std::ostringstream out;
    for (const auto& community : frames[f]) {
      const auto members = metrics::resolve_members(graph, community.members);
      const auto profile = metrics::group_profile(graph, members, scores, metrics::ProfileMode::sgci,
                                                  std::nullopt, profile_options);
      metrics::write_profile(out, community.ref(), profile);
    }
    rows[f] = out.str();
  });
  std::ostringstream profiles;
  profiles << header("profiles", "", detect_hash);
  metrics::write_profiles_header(profiles, metrics::ProfileMode::sgci);
  for (const auto& r : rows) profiles << r;
  write_atomic(dir("featurize") / "profiles.csv", profiles.str());
  std::istringstream profile_text(profiles.str());
  const auto table = parse_profiles(body_of(profile_text));

  const auto cells = track_cells();
  const auto& lengths = config_.chain_lengths;
  parallel_for(cells.size() * lengths.size(), options_.threads, [&](std::size_t i) {
    const auto& cell = cells[i / lengths.size()];
    const std::size_t length = lengths[i % lengths.size()];
    const std::string key = cell + "/" + length_dir(length);
    const std::string upstream = stage_hash("chains", key);
    std::istringstream in(read_checked(dir("chains") / cell / length_dir(length) / "chains.jsonl", upstream));
    const auto chain_list = chains::read_chains(in);
    const auto data = chains::assemble_dataset(chain_list, table, config_.method, length);
    std::ostringstream csv;
    csv << header("featurize", key, upstream);
    write_dataset_csv(csv, data);
    std::ostringstream schema;
    schema << header("featurize", key, upstream);
    write_schema(schema, data);
    write_atomic(dir("featurize") / cell / length_dir(length) / "dataset.csv", csv.str());
    write_atomic(dir("featurize") / cell / length_dir(length) / "schema.json", schema.str());
  });
}

namespace {

struct EvalCell {
  std::string track;
  std::size_t length;
  std::string classifier;
  std::size_t classifier_index;

  std::string key() const { return track + "/" + length_dir(length) + "/" + classifier; }
  fs::path path() const { return fs::path(track) / length_dir(length) / classifier; }
};

std::vector<EvalCell> eval_cells(const Pipeline& p, const std::vector<std::size_t>& lengths) {
  std::vector<EvalCell> cells;
  const auto classifiers = p.classifier_cells();
  for (const auto& t : p.track_cells()) {
    for (std::size_t l : lengths) {
      for (std::size_t c = 0; c < classifiers.size(); ++c) cells.push_back({t, l, classifiers[c], c});
    }
  }
  return cells;
}

/// Reason a dataset cannot be cross-validated, or empty.
std::string unusable(const Dataset& data, std::size_t folds) {
  std::set<std::size_t> present(data.labels.begin(), data.labels.end());
  if (present.size() < 2) return "fewer than two classes";
  if (data.size() < folds) return "fewer rows than folds";
  return {};
}

}  // namespace

void Pipeline::evaluate() {
  const auto cells = eval_cells(*this, config_.chain_lengths);
  parallel_for(cells.size(), options_.threads, [&](std::size_t i) {
    const auto& cell = cells[i];
    const std::string data_key = cell.track + "/" + length_dir(cell.length);
    const std::string upstream = stage_hash("featurize", data_key);
    const fs::path data_dir = dir("featurize") / cell.track / length_dir(cell.length);
    std::istringstream csv(read_checked(data_dir / "dataset.csv", upstream));
    std::istringstream schema(read_checked(data_dir / "schema.json", upstream));
    const auto data = read_dataset(csv, schema);
    std::ostringstream out;
    out << header("evaluate", cell.key(), upstream);
    if (const auto reason = unusable(data, config_.cv_folds); !reason.empty()) {
      out << ordered_json{{"skipped", reason}, {"rows", data.size()}}.dump(2) << '\n';
    } else {
      learn::CrossValidationOptions cv{config_.cv_folds, config_.seed, config_.global_normalization};
      const auto report = learn::cross_validate(data, config_.classifiers[cell.classifier_index], cv);
      learn::write_report(out, report);
    }
    write_atomic(dir("evaluate") / cell.path() / "report.json", out.str());
  });
}

void Pipeline::select() {
  if (!config_.selection.enabled) return;
  const auto lengths = config_.selection.chain_lengths.empty() ? config_.chain_lengths : config_.selection.chain_lengths;
  const auto cells = eval_cells(*this, lengths);
  parallel_for(cells.size(), options_.threads, [&](std::size_t i) {
    const auto& cell = cells[i];
    const std::string data_key = cell.track + "/" + length_dir(cell.length);
    const std::string upstream = stage_hash("featurize", data_key);
    const fs::path data_dir = dir("featurize") / cell.track / length_dir(cell.length);
    std::istringstream csv(read_checked(data_dir / "dataset.csv", upstream));
    std::istringstream schema(read_checked(data_dir / "schema.json", upstream));
    const auto data = read_dataset(csv, schema);
    std::ostringstream out;
    out << header("select", cell.key(), upstream);
    if (const auto reason = unusable(data, config_.cv_folds); !reason.empty() || data.feature_count() < 2) {
      out << ordered_json{{"skipped", reason.empty() ? "fewer than two features" : reason}}.dump(2) << '\n';
    } else {
      learn::SelectionOptions options;
      options.cv = {config_.cv_folds, config_.seed, config_.global_normalization};
      options.epsilon = config_.selection.epsilon;
      const auto result =
          learn::backward_feature_elimination(data, config_.classifiers[cell.classifier_index], options);
      learn::write_selection(out, data, result);
    }
    write_atomic(dir("select") / cell.path() / "selection.json", out.str());
  });
}

void Pipeline::report() {
  std::vector<ReportRow> rows;
  for (const auto& cell : eval_cells(*this, config_.chain_lengths)) {
    const auto body = read_checked(dir("evaluate") / cell.path() / "report.json", stage_hash("evaluate", cell.key()));
    json doc;
    try {
      doc = json::parse(body);
    } catch (const json::exception& e) {
      throw ParseError(0, "malformed report " + cell.key() + ": " + e.what());
    }
    if (doc.contains("skipped")) continue;
    for (const auto& label : doc.at("classes")) {
      const auto& s = doc.at("per_class").at(label.get<std::string>());
      rows.push_back({cell.track, cell.classifier, cell.length, label.get<std::string>(),
                      s.at("precision").get<double>(), s.at("recall").get<double>(), s.at("f").get<double>(),
                      doc.at("macro_f").get<double>()});
    }
  }
  const std::string head = header("report", "", "");
  write_atomic(dir("report") / "f_measure.csv", head + report_csv(rows));
  write_atomic(dir("report") / "f_measure.svg", report_svg(rows));
}

void Pipeline::run_all() {
  slice();
  detect();
  track();
  chains();
  featurize();
  evaluate();
  select();
  report();
}

// ---------------------------------------------------------------------------
// Report rendering

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "track_cell,classifier,chain_length,class,precision,recall,f,macro_f\n";
  for (const auto& r : rows) {
    out << r.track_cell << ',' << r.classifier << ',' << r.chain_length << ',' << r.event << ','
        << number(r.precision) << ',' << number(r.recall) << ',' << number(r.f) << ',' << number(r.macro_f) << '\n';
  }
  return out.str();
}

std::string report_svg(const std::vector<ReportRow>& rows) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::map<std::size_t, double>>> panels;
  std::set<std::size_t> lengths;
  std::set<std::string> events;
  for (const auto& r : rows) {
    panels[{r.track_cell, r.classifier}][r.event][r.chain_length] = r.f;
    lengths.insert(r.chain_length);
    events.insert(r.event);
  }
  const double width = 560, panel_h = 300, left = 60, right = 160, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = panel_h - top - bottom;
  const std::size_t count = std::max<std::size_t>(1, panels.size());
  auto fmt = [](double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.2f", v);
    return std::string(buffer);
  };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
      << fmt(panel_h * static_cast<double>(count)) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (panels.empty()) svg << "<text x=\"20\" y=\"40\">no evaluation results</text>\n";
  const std::size_t lo = lengths.empty() ? 2 : *lengths.begin();
  const std::size_t hi = lengths.empty() ? 3 : std::max(*lengths.rbegin(), lo + 1);
  auto x_of = [&](std::size_t l) { return left + plot_w * static_cast<double>(l - lo) / static_cast<double>(hi - lo); };
  std::size_t index = 0;
  for (const auto& [key, lines] : panels) {
    const double y0 = panel_h * static_cast<double>(index++);
    auto y_of = [&](double f) { return y0 + top + plot_h * (1.0 - f); };
    svg << "<text x=\"" << fmt(left) << "\" y=\"" << fmt(y0 + 20) << "\" font-size=\"13\">" << key.first << " / "
        << key.second << ": F-measure by chain length</text>\n";
    svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y_of(0)) << "\" x2=\"" << fmt(left + plot_w) << "\" y2=\""
        << fmt(y_of(0)) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y_of(0)) << "\" x2=\"" << fmt(left) << "\" y2=\""
        << fmt(y_of(1)) << "\" stroke=\"black\"/>\n";
    for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      svg << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(y_of(tick) + 4) << "\" text-anchor=\"end\">"
          << fmt(tick) << "</text>\n";
    }
    for (std::size_t l : lengths) {
      svg << "<text x=\"" << fmt(x_of(l)) << "\" y=\"" << fmt(y_of(0) + 16) << "\" text-anchor=\"middle\">" << l
          << "</text>\n";
    }
    svg << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\"" << fmt(y_of(0) + 34)
        << "\" text-anchor=\"middle\">chain length</text>\n";
    std::size_t color = 0;
    for (const auto& event : events) {
      const char* stroke = palette[color++ % (sizeof palette / sizeof palette[0])];
      const double legend_y = y0 + top + 16.0 * static_cast<double>(color - 1);
      svg << "<text x=\"" << fmt(left + plot_w + 28) << "\" y=\"" << fmt(legend_y + 4) << "\">" << event << "</text>\n";
      svg << "<line x1=\"" << fmt(left + plot_w + 8) << "\" y1=\"" << fmt(legend_y) << "\" x2=\""
          << fmt(left + plot_w + 24) << "\" y2=\"" << fmt(legend_y) << "\" stroke=\"" << stroke
          << "\" stroke-width=\"2\"/>\n";
      auto it = lines.find(event);
      if (it == lines.end()) continue;
      svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
      bool first = true;
      for (const auto& [l, f] : it->second) {
        svg << (first ? "" : " ") << fmt(x_of(l)) << ',' << fmt(y_of(f));
        first = false;
      }
      svg << "\"/>\n";
      for (const auto& [l, f] : it->second) {
        svg << "<circle cx=\"" << fmt(x_of(l)) << "\" cy=\"" << fmt(y_of(f)) << "\" r=\"3\" fill=\"" << stroke
            << "\"/>\n";
      }
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace evochain::pipeline
