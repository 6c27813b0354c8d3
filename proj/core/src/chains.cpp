#include "evochain/chains.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include "evochain/error.hpp"
#include "evochain/metrics.hpp"
#include "evochain/random.hpp"
#include "json.hpp"

namespace evochain::chains {

using nlohmann::json;

namespace {

std::string age_tag(std::size_t age) { return age == 0 ? "t0" : "t-" + std::to_string(age); }

std::vector<std::string> sorted_labels(Method method) {
  std::vector<std::string> labels;
  if (method == Method::ged) {
    for (auto event : ged::all_events()) labels.emplace_back(ged::to_string(event));
  } else {
    for (auto event : sgci::all_events()) labels.emplace_back(sgci::to_string(event));
  }
  std::sort(labels.begin(), labels.end());
  return labels;
}

}  // namespace

std::string_view to_string(Method method) { return method == Method::ged ? "ged" : "sgci"; }

Method method_from_string(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "ged") return Method::ged;
  if (lower == "sgci") return Method::sgci;
  throw ConfigError("unknown tracking method '" + std::string(text) + "'");
}

TransitionGraph from_ged(std::span<const ged::TransitionEvent> events) {
  TransitionGraph graph;
  graph.method = Method::ged;
  for (const auto& event : events) {
    const std::string label(ged::to_string(event.event));
    if (event.from) graph.targets[*event.from].push_back(label);
    if (event.from && event.to) {
      if (!event.inclusion) throw IntegrityError("GED event between groups lacks inclusion values");
      graph.incoming[*event.to].push_back({*event.from, *event.to, label, event.inclusion});
    }
  }
  for (auto& [to, links] : graph.incoming) {
    std::stable_sort(links.begin(), links.end(),
                     [](const TransitionLink& a, const TransitionLink& b) { return a.from < b.from; });
  }
  return graph;
}

TransitionGraph from_sgci(std::span<const sgci::StableGroup> stable,
                          std::span<const sgci::StateLabel> labels) {
  TransitionGraph graph;
  graph.method = Method::sgci;
  std::map<GroupRef, std::string> dominating;
  for (const auto& label : labels) {
    const std::string event(sgci::to_string(label.dominating()));
    dominating[label.group] = event;
    graph.targets[label.group].push_back(event);
  }
  std::set<std::pair<GroupRef, GroupRef>> edges;
  for (const auto& group : stable) {
    for (std::size_t i = 0; i + 1 < group.states.size(); ++i) {
      edges.insert({group.states[i], group.states[i + 1]});
    }
  }
  for (const auto& [from, to] : edges) {
    auto it = dominating.find(from);
    if (it == dominating.end()) throw IntegrityError("stable state " + to_string(from) + " has no label");
    graph.incoming[to].push_back({from, to, it->second, std::nullopt});
  }
  return graph;
}

std::vector<EvolutionChain> build_chains(const TransitionGraph& graph, std::size_t length) {
  if (length < 2) throw ParameterError("chain length must be at least 2");
  std::vector<EvolutionChain> chains;
  std::vector<const TransitionLink*> links;  // newest first

  for (const auto& [focal, targets] : graph.targets) {
    for (const auto& target : targets) {
      auto walk = [&](auto&& self, const GroupRef& state) -> void {
        if (links.size() + 1 == length) {
          EvolutionChain chain;
          chain.states.push_back(links.back()->from);
          for (auto it = links.rbegin(); it != links.rend(); ++it) {
            chain.states.push_back((*it)->to);
            chain.transitions.push_back((*it)->event);
            if ((*it)->inclusion) chain.inclusions.push_back(*(*it)->inclusion);
          }
          chain.target = target;
          chains.push_back(std::move(chain));
          return;
        }
        auto it = graph.incoming.find(state);
        if (it == graph.incoming.end()) return;
        for (const auto& link : it->second) {
          links.push_back(&link);
          self(self, link.from);
          links.pop_back();
        }
      };
      walk(walk, focal);
    }
  }
  return chains;
}

std::vector<EvolutionChain> sample_chains(std::span<const EvolutionChain> chains, double fraction,
                                          std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ParameterError("sample fraction must lie in (0, 1]");
  if (fraction == 1.0) return {chains.begin(), chains.end()};
  Rng rng(seed);
  std::map<std::string, std::vector<std::size_t>> by_target;
  for (std::size_t i = 0; i < chains.size(); ++i) by_target[chains[i].target].push_back(i);
  std::vector<std::size_t> kept;
  for (auto& [target, indices] : by_target) {
    shuffle(std::span<std::size_t>(indices), rng);
    const auto take = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(indices.size()))), 1,
        indices.size());
    kept.insert(kept.end(), indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(kept.begin(), kept.end());
  std::vector<EvolutionChain> out;
  out.reserve(kept.size());
  for (std::size_t i : kept) out.push_back(chains[i]);
  return out;
}

std::vector<FeatureInfo> chain_schema(Method method, std::size_t length) {
  if (length < 2) throw ParameterError("chain length must be at least 2");
  const auto mode = method == Method::ged ? metrics::ProfileMode::ged : metrics::ProfileMode::sgci;
  std::vector<FeatureInfo> features;
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t age = length - 1 - i;
    for (const auto& name : metrics::feature_names(mode)) {
      features.push_back({age_tag(age) + "_" + name, FeatureKind::numeric, age, {}});
    }
  }
  if (method == Method::ged) {
    const auto categories = sorted_labels(Method::ged);
    for (std::size_t i = 0; i + 1 < length; ++i) {
      const std::size_t age = length - 2 - i;
      features.push_back({"event_" + age_tag(age + 1) + "_" + age_tag(age), FeatureKind::categorical, age,
                          categories});
    }
  }
  return features;
}

Dataset assemble_dataset(std::span<const EvolutionChain> chains, const ProfileTable& profiles,
                         Method method, std::size_t length) {
  Dataset data;
  data.features = chain_schema(method, length);
  std::set<std::string> classes;
  for (const auto& chain : chains) classes.insert(chain.target);
  data.classes.assign(classes.begin(), classes.end());
  const auto categories = method == Method::ged ? sorted_labels(Method::ged) : std::vector<std::string>{};

  for (const auto& chain : chains) {
    if (chain.states.size() != length || chain.transitions.size() + 1 != length) {
      throw IntegrityError("chain does not have " + std::to_string(length) + " states");
    }
    if (method == Method::ged && chain.inclusions.size() + 1 != length) {
      throw IntegrityError("GED chain lacks inclusion values");
    }
    std::vector<double> row;
    row.reserve(data.features.size());
    for (std::size_t i = 0; i < length; ++i) {
      const auto& state = chain.states[i];
      auto it = profiles.find(state);
      if (it == profiles.end()) throw IntegrityError("no profile for " + to_string(state));
      if (it->second.size() != metrics::kSgciFeatureCount) {
        throw IntegrityError("profile for " + to_string(state) + " has the wrong width");
      }
      row.insert(row.end(), it->second.begin(), it->second.end());
      if (method == Method::ged) {
        const Inclusion& inc = chain.inclusions[std::min(i, length - 2)];
        row.push_back(inc.alpha);
        row.push_back(inc.beta);
      }
    }
    if (method == Method::ged) {
      for (const auto& event : chain.transitions) {
        auto it = std::find(categories.begin(), categories.end(), event);
        if (it == categories.end()) throw IntegrityError("unknown GED event '" + event + "' in chain");
        row.push_back(static_cast<double>(it - categories.begin()));
      }
    }
    data.rows.push_back(std::move(row));
    data.labels.push_back(static_cast<std::size_t>(
        std::find(data.classes.begin(), data.classes.end(), chain.target) - data.classes.begin()));
  }
  return data;
}

void write_chains(std::ostream& out, std::span<const EvolutionChain> chains) {
  for (const auto& chain : chains) {
    json states = json::array();
    for (const auto& s : chain.states) states.push_back({s.frame, s.id});
    json inclusions = json::array();
    for (const auto& inc : chain.inclusions) inclusions.push_back({inc.alpha, inc.beta});
    out << "{\"states\":" << states.dump() << ",\"transitions\":" << json(chain.transitions).dump()
        << ",\"inclusions\":" << inclusions.dump() << ",\"target\":" << json(chain.target).dump() << "}\n";
  }
}

std::vector<EvolutionChain> read_chains(std::istream& in) {
  std::vector<EvolutionChain> chains;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    try {
      json object = json::parse(line);
      EvolutionChain chain;
      for (const auto& s : object.at("states")) {
        chain.states.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
      }
      chain.transitions = object.at("transitions").get<std::vector<std::string>>();
      for (const auto& inc : object.at("inclusions")) {
        chain.inclusions.push_back({inc.at(0).get<double>(), inc.at(1).get<double>()});
      }
      chain.target = object.at("target").get<std::string>();
      chains.push_back(std::move(chain));
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("malformed chain record: ") + e.what());
    }
  }
  return chains;
}

}  // namespace evochain::chains
