#include "evochain/learn/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include "evochain/error.hpp"
#include "json.hpp"

namespace evochain::learn {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

struct Inputs {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> features;
};

Inputs resolve(const Dataset& data, std::span<const std::size_t> rows, std::span<const std::size_t> features) {
  Inputs in;
  in.rows = rows.empty() ? all_indices(data.size()) : std::vector<std::size_t>(rows.begin(), rows.end());
  in.features = features.empty() ? all_indices(data.feature_count())
                                 : std::vector<std::size_t>(features.begin(), features.end());
  if (in.rows.empty()) throw ParameterError("cannot train on an empty dataset");
  if (in.features.empty()) throw ParameterError("cannot train without features");
  return in;
}

std::size_t distinct_classes(const Dataset& data, std::span<const std::size_t> rows) {
  std::set<std::size_t> seen;
  for (std::size_t r : rows) seen.insert(data.labels[r]);
  return seen.size();
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::tree: return "tree";
    case ModelKind::forest: return "forest";
    case ModelKind::adaboost: return "adaboost";
    case ModelKind::bagging: return "bagging";
  }
  return "unknown";
}

ModelKind model_kind_from_string(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (ModelKind kind : {ModelKind::tree, ModelKind::forest, ModelKind::adaboost, ModelKind::bagging}) {
    if (to_string(kind) == lower) return kind;
  }
  throw ConfigError("unknown classifier '" + std::string(text) + "'");
}

void ModelParams::validate() const {
  if (tree.min_leaf == 0 || forest_tree.min_leaf == 0) throw ParameterError("min_leaf must be positive");
  if (n_trees == 0) throw ParameterError("a forest needs at least one tree");
  if (n_rounds == 0) throw ParameterError("boosting needs at least one round");
  if (n_bags == 0) throw ParameterError("bagging needs at least one bag");
}

std::size_t Model::predict(std::span<const double> row) const {
  std::vector<double> votes(classes_.size(), 0.0);
  for (std::size_t m = 0; m < members_.size(); ++m) votes[members_[m].predict(row)] += weights_[m];
  std::size_t best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return best;
}

std::vector<std::size_t> Model::predict(const Dataset& data, std::span<const std::size_t> rows) const {
  if (data.fingerprint() != fingerprint_) {
    throw IntegrityError("dataset schema " + data.fingerprint() + " does not match model schema " + fingerprint_);
  }
  std::vector<std::size_t> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(predict(data.rows.at(r)));
  return out;
}

std::vector<std::size_t> Model::used_features() const {
  std::set<std::size_t> used;
  for (const auto& tree : members_) {
    for (std::size_t f : tree.used_features()) used.insert(f);
  }
  return {used.begin(), used.end()};
}

double samme_weight(double error, std::size_t classes) {
  if (!(error > 0.0 && error < 1.0)) throw ParameterError("boosting error must lie in (0, 1)");
  if (classes < 2) throw ParameterError("boosting needs at least two classes");
  return std::log((1.0 - error) / error) + std::log(static_cast<double>(classes - 1));
}

std::vector<std::size_t> bootstrap_rows(std::span<const std::size_t> rows, Rng& rng) {
  std::vector<std::size_t> sample(rows.size());
  for (auto& r : sample) r = rows[uniform_index(rng, rows.size())];
  return sample;
}

Model train_tree(const Dataset& data, std::span<const std::size_t> rows, std::span<const std::size_t> features,
                 const ModelParams& params) {
  params.validate();
  auto in = resolve(data, rows, features);
  Model model;
  model.kind_ = ModelKind::tree;
  model.classes_ = data.classes;
  model.fingerprint_ = data.fingerprint();
  model.members_.push_back(DecisionTree::fit(data, in.rows, {}, in.features, params.tree));
  model.weights_.push_back(1.0);
  return model;
}

Model train_forest(const Dataset& data, std::span<const std::size_t> rows, std::span<const std::size_t> features,
                   const ModelParams& params) {
  params.validate();
  auto in = resolve(data, rows, features);
  TreeParams member = params.forest_tree;
  member.mtry = params.mtry != 0
                    ? params.mtry
                    : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(in.features.size()))));
  Model model;
  model.kind_ = ModelKind::forest;
  model.classes_ = data.classes;
  model.fingerprint_ = data.fingerprint();
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(params.seed, t));
    auto sample = bootstrap_rows(in.rows, rng);
    model.members_.push_back(DecisionTree::fit(data, sample, {}, in.features, member, &rng));
    model.weights_.push_back(1.0);
  }
  return model;
}

Model train_adaboost(const Dataset& data, std::span<const std::size_t> rows,
                     std::span<const std::size_t> features, const ModelParams& params) {
  params.validate();
  auto in = resolve(data, rows, features);
  const std::size_t k = std::max<std::size_t>(2, distinct_classes(data, in.rows));
  Model model;
  model.kind_ = ModelKind::adaboost;
  model.classes_ = data.classes;
  model.fingerprint_ = data.fingerprint();

  const std::size_t n = in.rows.size();
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    DecisionTree tree = DecisionTree::fit(data, in.rows, weights, in.features, params.tree);
    std::vector<bool> miss(n);
    double error = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      miss[i] = tree.predict(data.rows[in.rows[i]]) != data.labels[in.rows[i]];
      if (miss[i]) error += weights[i];
      total += weights[i];
    }
    error /= total;
    if (error <= 0.0) {
      model.members_.assign(1, std::move(tree));
      model.weights_.assign(1, 1.0);
      break;
    }
    if (error >= 1.0 - 1.0 / static_cast<double>(k)) {
      if (round == 0) {
        model.members_.push_back(std::move(tree));
        model.weights_.push_back(1.0);
        model.warning_ = true;
      }
      break;
    }
    const double alpha = samme_weight(error, k);
    model.members_.push_back(std::move(tree));
    model.weights_.push_back(alpha);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (miss[i]) weights[i] *= std::exp(alpha);
      sum += weights[i];
    }
    for (auto& w : weights) w /= sum;
  }
  return model;
}

Model train_bagging(const Dataset& data, std::span<const std::size_t> rows, std::span<const std::size_t> features,
                    const ModelParams& params) {
  params.validate();
  auto in = resolve(data, rows, features);
  Model model;
  model.kind_ = ModelKind::bagging;
  model.classes_ = data.classes;
  model.fingerprint_ = data.fingerprint();
  for (std::size_t b = 0; b < params.n_bags; ++b) {
    Rng rng(derive_seed(params.seed, b));
    auto sample = bootstrap_rows(in.rows, rng);
    model.members_.push_back(DecisionTree::fit(data, sample, {}, in.features, params.tree));
    model.weights_.push_back(1.0);
  }
  return model;
}

Model train(const Dataset& data, std::span<const std::size_t> rows, std::span<const std::size_t> features,
            const ModelParams& params) {
  switch (params.kind) {
    case ModelKind::tree: return train_tree(data, rows, features, params);
    case ModelKind::forest: return train_forest(data, rows, features, params);
    case ModelKind::adaboost: return train_adaboost(data, rows, features, params);
    case ModelKind::bagging: return train_bagging(data, rows, features, params);
  }
  throw ParameterError("unknown model kind");
}

void Model::save(std::ostream& out) const {
  json members = json::array();
  for (const auto& tree : members_) {
    json nodes = json::array();
    for (const auto& node : tree.nodes()) {
      nodes.push_back({{"feature", node.feature},
                       {"categorical", node.categorical},
                       {"threshold", node.threshold},
                       {"children", node.children},
                       {"label", node.label}});
    }
    members.push_back(std::move(nodes));
  }
  json doc = {{"format", "evochain-model"},
              {"version", kFormatVersion},
              {"kind", std::string(to_string(kind_))},
              {"classes", classes_},
              {"fingerprint", fingerprint_},
              {"warning", warning_},
              {"weights", weights_},
              {"members", members}};
  out << doc.dump() << '\n';
}

Model Model::load(std::istream& in) {
  try {
    json doc = json::parse(in);
    if (doc.at("format") != "evochain-model") throw ParseError(0, "not a model file");
    if (doc.at("version").get<int>() != kFormatVersion) {
      throw ParseError(0, "unsupported model version " + doc.at("version").dump());
    }
    Model model;
    model.kind_ = model_kind_from_string(doc.at("kind").get<std::string>());
    model.classes_ = doc.at("classes").get<std::vector<std::string>>();
    model.fingerprint_ = doc.at("fingerprint").get<std::string>();
    model.warning_ = doc.at("warning").get<bool>();
    model.weights_ = doc.at("weights").get<std::vector<double>>();
    for (const auto& nodes : doc.at("members")) {
      std::vector<TreeNode> tree;
      for (const auto& n : nodes) {
        TreeNode node;
        node.feature = n.at("feature").get<int>();
        node.categorical = n.at("categorical").get<bool>();
        node.threshold = n.at("threshold").get<double>();
        node.children = n.at("children").get<std::vector<std::size_t>>();
        node.label = n.at("label").get<std::size_t>();
        if (node.label >= model.classes_.size()) throw IntegrityError("tree leaf predicts an unknown class");
        tree.push_back(std::move(node));
      }
      model.members_.push_back(DecisionTree::from_nodes(std::move(tree)));
    }
    if (model.members_.size() != model.weights_.size() || model.members_.empty()) {
      throw IntegrityError("model members and weights disagree");
    }
    return model;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed model file: ") + e.what());
  }
}

}  // namespace evochain::learn
