#include "evochain/synth.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "evochain/error.hpp"
#include "evochain/random.hpp"
#include "json.hpp"

namespace evochain::synth {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<Op, 10> kOps = {Op::form,  Op::continue_, Op::grow,     Op::shrink, Op::split,
                                     Op::merge, Op::dissolve,  Op::detach, Op::attach, Op::split_merge};

Op op_from_string(std::string_view text) {
  for (Op op : kOps) {
    if (to_string(op) == text) return op;
  }
  throw ParseError(0, "unknown directive '" + std::string(text) + "'");
}

bool sgci_only(Op op) { return op == Op::detach || op == Op::attach || op == Op::split_merge; }

[[noreturn]] void fail(std::size_t step, std::size_t index, const std::string& message) {
  throw ParameterError("step " + std::to_string(step) + " directive " + std::to_string(index) + ": " +
                       message);
}

/// The groups a directive consumes from frame n.
std::vector<std::string> subjects(const Directive& d) {
  switch (d.op) {
    case Op::form: return {};
    case Op::merge: return d.groups;
    case Op::attach:
    case Op::split_merge: return {d.group, d.target};
    default: return {d.group};
  }
}

/// Names a directive introduces in frame n + 1 besides surviving subjects.
std::vector<std::string> created(const Directive& d) {
  switch (d.op) {
    case Op::form:
    case Op::merge:
    case Op::detach: return {d.name};
    case Op::split: {
      std::vector<std::string> names;
      for (const auto& p : d.parts) names.push_back(p.name);
      return names;
    }
    case Op::split_merge: return {d.parts.empty() ? std::string() : d.parts[0].name, d.name};
    default: return {};
  }
}

std::string node_name(std::size_t index) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "n%05zu", index);
  return buffer;
}

using Members = std::vector<std::string>;

struct PlantedLink {
  std::string from;
  std::string to;
  std::size_t overlap;
};

struct StepTruth {
  std::vector<std::tuple<std::optional<std::string>, std::optional<std::string>, ged::Event>> ged;
  std::map<std::string, sgci::Event> sgci;
  std::vector<PlantedLink> links;
};

class Generator {
 public:
  Generator(const Scenario& scenario, std::uint64_t seed)
      : scenario_(scenario), structure_(derive_seed(seed, 1)), churn_(derive_seed(seed, 2)), seed_(seed) {}

  Generated run(const sgci::Parameters& params) {
    std::map<std::string, Members> frame;
    for (const auto& g : scenario_.initial) frame[g.name] = fresh(g.size);
    frames_.push_back(frame);
    for (std::size_t n = 0; n < scenario_.steps.size(); ++n) {
      StepTruth truth;
      frame = apply(frames_.back(), scenario_.steps[n], truth);
      apply_churn(frame);
      frames_.push_back(frame);
      truths_.push_back(std::move(truth));
    }
    Generated out;
    build_communities(out);
    for (std::size_t f = 0; f < frames_.size(); ++f) out.graphs.push_back(render(f));
    if (scenario_.taxonomy == Taxonomy::ged) {
      ged_truth(out);
    } else {
      sgci_truth(out, params);
    }
    return out;
  }

 private:
  Members fresh(std::size_t count) {
    Members members;
    for (std::size_t i = 0; i < count; ++i) members.push_back(node_name(++next_node_));
    std::sort(members.begin(), members.end());
    return members;
  }

  Members take_random(Members& from, std::size_t count) {
    shuffle(std::span<std::string>(from), structure_);
    Members taken(from.end() - static_cast<std::ptrdiff_t>(count), from.end());
    from.resize(from.size() - count);
    std::sort(from.begin(), from.end());
    std::sort(taken.begin(), taken.end());
    return taken;
  }

  static Members unite(const Members& a, const Members& b) {
    Members out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
  }

  std::map<std::string, Members> apply(const std::map<std::string, Members>& current,
                                       const std::vector<Directive>& directives, StepTruth& truth) {
    std::map<std::string, Members> next;
    std::set<std::string> mentioned;
    for (const auto& d : directives) {
      for (const auto& s : subjects(d)) mentioned.insert(s);
    }
    for (const auto& d : directives) {
      switch (d.op) {
        case Op::form:
          next[d.name] = fresh(d.size);
          truth.ged.push_back({std::nullopt, d.name, ged::Event::forming});
          break;
        case Op::continue_:
          next[d.group] = current.at(d.group);
          record(truth, d.group, d.group, current.at(d.group).size(), ged::Event::continuing,
                 sgci::Event::constancy);
          break;
        case Op::grow: {
          Members members = unite(current.at(d.group), fresh(d.by));
          next[d.group] = members;
          record(truth, d.group, d.group, current.at(d.group).size(), ged::Event::growing,
                 sgci::Event::change_size);
          break;
        }
        case Op::shrink: {
          Members members = current.at(d.group);
          take_random(members, d.by);
          record(truth, d.group, d.group, members.size(), ged::Event::shrinking, sgci::Event::change_size);
          next[d.group] = std::move(members);
          break;
        }
        case Op::split: {
          Members rest = current.at(d.group);
          for (std::size_t p = 0; p < d.parts.size(); ++p) {
            Members part = p + 1 == d.parts.size() ? rest : take_random(rest, d.parts[p].size);
            record(truth, d.group, d.parts[p].name, part.size(), ged::Event::splitting, sgci::Event::split);
            next[d.parts[p].name] = std::move(part);
          }
          break;
        }
        case Op::merge: {
          Members merged;
          for (const auto& g : d.groups) {
            merged = unite(merged, current.at(g));
            record(truth, g, d.name, current.at(g).size(), ged::Event::merging, sgci::Event::merge);
          }
          next[d.name] = std::move(merged);
          break;
        }
        case Op::dissolve:
          truth.ged.push_back({d.group, std::nullopt, ged::Event::dissolving});
          truth.sgci[d.group] = sgci::Event::decay;
          break;
        case Op::detach: {
          Members members = current.at(d.group);
          Members leaving = take_random(members, d.size);
          truth.sgci[d.group] = sgci::Event::deletion;
          truth.links.push_back({d.group, d.group, members.size()});
          truth.links.push_back({d.group, d.name, leaving.size()});
          next[d.group] = std::move(members);
          next[d.name] = std::move(leaving);
          break;
        }
        case Op::attach: {
          const auto& host = current.at(d.target);
          const auto& guest = current.at(d.group);
          next[d.target] = unite(host, guest);
          truth.sgci[d.target] = sgci::Event::addition;
          truth.sgci[d.group] = sgci::Event::decay;
          truth.links.push_back({d.target, d.target, host.size()});
          truth.links.push_back({d.group, d.target, guest.size()});
          break;
        }
        case Op::split_merge: {
          Members rest = current.at(d.group);
          Members kept = take_random(rest, d.parts[0].size);
          truth.sgci[d.group] = sgci::Event::split_merge;
          truth.sgci[d.target] = sgci::Event::merge;
          truth.links.push_back({d.group, d.parts[0].name, kept.size()});
          truth.links.push_back({d.group, d.name, rest.size()});
          truth.links.push_back({d.target, d.name, current.at(d.target).size()});
          next[d.parts[0].name] = std::move(kept);
          next[d.name] = unite(rest, current.at(d.target));
          break;
        }
      }
    }
    for (const auto& [name, members] : current) {
      if (mentioned.count(name)) continue;
      next[name] = members;
      record(truth, name, name, members.size(), ged::Event::continuing, sgci::Event::constancy);
    }
    return next;
  }

  static void record(StepTruth& truth, const std::string& from, const std::string& to, std::size_t overlap,
                     ged::Event ged_event, sgci::Event sgci_event) {
    truth.ged.push_back({from, to, ged_event});
    truth.sgci[from] = sgci_event;
    truth.links.push_back({from, to, overlap});
  }

  void apply_churn(std::map<std::string, Members>& frame) {
    for (auto& [name, members] : frame) {
      for (auto& member : members) {
        // One draw per member whatever the rate, so runs at different rates
        // churn nested member sets.
        if (uniform01(churn_) < scenario_.churn) member = node_name(++next_node_);
      }
      std::sort(members.begin(), members.end());
    }
  }

  void build_communities(Generated& out) {
    for (std::size_t f = 0; f < frames_.size(); ++f) {
      std::vector<Community> communities;
      for (const auto& [name, members] : frames_[f]) communities.push_back({f, 0, members});
      assign_community_ids(communities);
      std::map<std::string, std::size_t> ids;
      for (const auto& [name, members] : frames_[f]) {
        for (const auto& c : communities) {
          if (c.members == members) ids[name] = c.id;
        }
      }
      ids_.push_back(std::move(ids));
      out.communities.push_back(std::move(communities));
    }
  }

  SnapshotGraph render(std::size_t f) {
    Rng rng(derive_seed(seed_, 100 + f));
    GraphBuilder builder;
    std::map<std::string, std::string> group_of;
    for (const auto& [name, members] : frames_[f]) {
      for (const auto& m : members) {
        builder.add_node(m);
        group_of[m] = name;
      }
      const std::size_t n = members.size();
      for (std::size_t i = 0; i < n; ++i) {
        bool linked = false;
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          if (uniform01(rng) < scenario_.p_in) {
            builder.add_arc(members[i], members[j]);
            linked = true;
          }
        }
        if (!linked && n > 1) {
          std::size_t j = uniform_index(rng, n - 1);
          if (j >= i) ++j;
          builder.add_arc(members[i], members[j]);
        }
      }
    }
    if (scenario_.p_out > 0.0) {
      std::vector<const std::string*> nodes;
      for (const auto& [node, group] : group_of) nodes.push_back(&node);
      for (const auto* u : nodes) {
        for (const auto* v : nodes) {
          if (u == v || group_of[*u] == group_of[*v]) continue;
          if (uniform01(rng) < scenario_.p_out) builder.add_arc(*u, *v);
        }
      }
    }
    return builder.build();
  }

  std::optional<GroupRef> ref(std::size_t frame, const std::optional<std::string>& name) const {
    if (!name) return std::nullopt;
    return GroupRef{frame, ids_[frame].at(*name)};
  }

  void ged_truth(Generated& out) const {
    for (std::size_t n = 0; n < truths_.size(); ++n) {
      for (const auto& [from, to, event] : truths_[n].ged) {
        out.ged_truth.push_back({ref(n, from), ref(n + 1, to), event, std::nullopt});
      }
    }
  }

  void sgci_truth(Generated& out, const sgci::Parameters& params) const {
    const std::size_t frames = frames_.size();
    std::vector<std::size_t> counts;
    for (const auto& c : out.communities) counts.push_back(c.size());
    std::vector<std::vector<sgci::Link>> major(truths_.size());
    for (std::size_t n = 0; n < truths_.size(); ++n) {
      for (const auto& link : truths_[n].links) {
        const std::size_t a = frames_[n].at(link.from).size();
        const std::size_t b = frames_[n + 1].at(link.to).size();
        const double score = static_cast<double>(link.overlap) / static_cast<double>(std::max(a, b));
        if (score >= params.mj_threshold) {
          major[n].push_back({ids_[n].at(link.from), ids_[n + 1].at(link.to), score, false});
        }
      }
    }
    const auto stable = sgci::identify_stable(counts, major, params.min_stability);
    std::set<GroupRef> states;
    for (const auto& group : stable) {
      for (const auto& s : group.states) {
        if (s.frame + 1 < frames) states.insert(s);
      }
    }
    for (const auto& state : states) {
      for (const auto& [name, event] : truths_[state.frame].sgci) {
        if (ids_[state.frame].at(name) == state.id) out.sgci_truth.push_back({state, std::nullopt, {event}});
      }
    }
  }

  const Scenario& scenario_;
  Rng structure_;
  Rng churn_;
  std::uint64_t seed_;
  std::size_t next_node_ = 0;
  std::vector<std::map<std::string, Members>> frames_;
  std::vector<StepTruth> truths_;
  std::vector<std::map<std::string, std::size_t>> ids_;
};

using GedKey = std::tuple<std::size_t, Members, Members, std::string>;

std::multiset<GedKey> ged_keys(const std::vector<std::vector<Community>>& frames,
                               const std::vector<ged::TransitionEvent>& events) {
  std::multiset<GedKey> keys;
  for (const auto& e : events) {
    if (!e.from && e.to && e.to->frame == 0) continue;
    const std::size_t n = e.from ? e.from->frame : e.to->frame - 1;
    Members from = e.from ? frames.at(e.from->frame).at(e.from->id).members : Members{};
    Members to = e.to ? frames.at(e.to->frame).at(e.to->id).members : Members{};
    keys.insert({n, std::move(from), std::move(to), std::string(ged::to_string(e.event))});
  }
  return keys;
}

template <typename Key>
RecoveryScore compare(const std::multiset<Key>& truth, const std::multiset<Key>& detected) {
  RecoveryScore s;
  s.truth = truth.size();
  s.detected = detected.size();
  auto t = truth.begin();
  auto d = detected.begin();
  while (t != truth.end() && d != detected.end()) {
    if (*t < *d) {
      ++t;
    } else if (*d < *t) {
      ++d;
    } else {
      ++s.matched;
      ++t;
      ++d;
    }
  }
  s.precision = s.detected ? static_cast<double>(s.matched) / static_cast<double>(s.detected) : 1.0;
  s.recall = s.truth ? static_cast<double>(s.matched) / static_cast<double>(s.truth) : 1.0;
  s.f = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

constexpr std::array<int, 9> kCycle = {0, 0, 1, 1, 2, 2, 0, 2, 1};

int next_event(HistoryRule rule, int previous, int last, Rng& rng) {
  switch (rule) {
    case HistoryRule::cycle:
      for (std::size_t i = 0; i < kCycle.size(); ++i) {
        if (kCycle[i] == previous && kCycle[(i + 1) % kCycle.size()] == last) {
          return kCycle[(i + 2) % kCycle.size()];
        }
      }
      break;
    case HistoryRule::shrink_shrink_grow: return previous == 2 && last == 2 ? 1 : 0;
    case HistoryRule::memoryless: return static_cast<int>(uniform_index(rng, 3));
  }
  throw ParameterError("unknown history rule");
}

}  // namespace

std::string_view to_string(Op op) {
  switch (op) {
    case Op::form: return "form";
    case Op::continue_: return "continue";
    case Op::grow: return "grow";
    case Op::shrink: return "shrink";
    case Op::split: return "split";
    case Op::merge: return "merge";
    case Op::dissolve: return "dissolve";
    case Op::detach: return "detach";
    case Op::attach: return "attach";
    case Op::split_merge: return "split_merge";
  }
  return "unknown";
}

void Scenario::validate() const {
  if (!(p_in >= 0.0 && p_in <= 1.0) || !(p_out >= 0.0 && p_out <= 1.0) || !(churn >= 0.0 && churn <= 1.0)) {
    throw ParameterError("p_in, p_out and churn must lie in [0, 1]");
  }
  std::map<std::string, std::size_t> alive;
  for (const auto& g : initial) {
    if (g.name.empty() || g.size == 0) throw ParameterError("initial groups need a name and a positive size");
    if (!alive.emplace(g.name, g.size).second) throw ParameterError("duplicate initial group '" + g.name + "'");
  }
  for (std::size_t step = 0; step < steps.size(); ++step) {
    std::set<std::string> used;
    std::set<std::string> fresh_names;
    std::map<std::string, std::size_t> next = alive;
    for (std::size_t i = 0; i < steps[step].size(); ++i) {
      const Directive& d = steps[step][i];
      if (taxonomy == Taxonomy::ged && sgci_only(d.op)) {
        fail(step, i, std::string(to_string(d.op)) + " is only available in SGCI scenarios");
      }
      for (const auto& s : subjects(d)) {
        if (!alive.count(s)) fail(step, i, "group '" + s + "' does not exist in this frame");
        if (!used.insert(s).second) fail(step, i, "group '" + s + "' is already changed in this step");
        next.erase(s);
      }
      for (const auto& c : created(d)) {
        if (c.empty()) fail(step, i, "new groups need a name");
        if (alive.count(c) || !fresh_names.insert(c).second) fail(step, i, "group name '" + c + "' is taken");
      }
      const std::size_t size = alive.count(d.group) ? alive.at(d.group) : 0;
      switch (d.op) {
        case Op::form:
          if (d.size == 0) fail(step, i, "form needs a positive size");
          next[d.name] = d.size;
          break;
        case Op::continue_:
        case Op::dissolve:
          if (d.op == Op::continue_) next[d.group] = size;
          break;
        case Op::grow:
        case Op::shrink:
          if (d.by == 0) fail(step, i, "grow and shrink need a positive amount");
          if (d.op == Op::shrink && d.by >= size) fail(step, i, "shrink would empty the group");
          next[d.group] = d.op == Op::grow ? size + d.by : size - d.by;
          break;
        case Op::split: {
          if (d.parts.size() < 2) fail(step, i, "split needs at least two parts");
          std::size_t total = 0;
          for (const auto& p : d.parts) {
            if (p.size == 0) fail(step, i, "split parts must be nonempty");
            total += p.size;
            next[p.name] = p.size;
          }
          if (total != size) fail(step, i, "split part sizes must sum to the group size");
          break;
        }
        case Op::merge: {
          if (d.groups.size() < 2) fail(step, i, "merge needs at least two groups");
          std::size_t total = 0;
          for (const auto& g : d.groups) total += alive.at(g);
          next[d.name] = total;
          break;
        }
        case Op::detach:
          if (d.size == 0 || d.size >= size) fail(step, i, "detach size must lie between 0 and the group size");
          next[d.group] = size - d.size;
          next[d.name] = d.size;
          break;
        case Op::attach:
          next[d.target] = alive.at(d.target) + size;
          break;
        case Op::split_merge:
          if (d.parts.size() != 1 || d.parts[0].size == 0 || d.parts[0].size >= size) {
            fail(step, i, "split_merge needs one kept part smaller than the group");
          }
          next[d.parts[0].name] = d.parts[0].size;
          next[d.name] = size - d.parts[0].size + alive.at(d.target);
          break;
      }
    }
    alive = std::move(next);
  }
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  try {
    json doc = json::parse(text);
    const auto taxonomy = doc.value("taxonomy", std::string("ged"));
    if (taxonomy == "ged") {
      s.taxonomy = Taxonomy::ged;
    } else if (taxonomy == "sgci") {
      s.taxonomy = Taxonomy::sgci;
    } else {
      throw ParseError(0, "unknown taxonomy '" + taxonomy + "'");
    }
    for (const auto& g : doc.at("initial")) s.initial.push_back({g.at("name"), g.at("size")});
    for (const auto& step : doc.at("steps")) {
      std::vector<Directive> directives;
      for (const auto& d : step) {
        Directive directive;
        directive.op = op_from_string(d.at("op").get<std::string>());
        directive.group = d.value("group", std::string());
        directive.groups = d.value("groups", std::vector<std::string>{});
        directive.name = d.value("name", std::string());
        directive.target = d.value("target", std::string());
        directive.size = d.value("size", std::size_t{0});
        directive.by = d.value("by", std::size_t{0});
        if (d.contains("parts")) {
          for (const auto& p : d.at("parts")) directive.parts.push_back({p.at("name"), p.at("size")});
        }
        directives.push_back(std::move(directive));
      }
      s.steps.push_back(std::move(directives));
    }
    s.p_in = doc.value("p_in", s.p_in);
    s.p_out = doc.value("p_out", s.p_out);
    s.churn = doc.value("churn", s.churn);
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed scenario: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario read_scenario(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

void write_scenario(std::ostream& out, const Scenario& scenario) {
  ordered_json doc;
  doc["taxonomy"] = scenario.taxonomy == Taxonomy::ged ? "ged" : "sgci";
  doc["p_in"] = scenario.p_in;
  doc["p_out"] = scenario.p_out;
  doc["churn"] = scenario.churn;
  doc["initial"] = ordered_json::array();
  for (const auto& g : scenario.initial) doc["initial"].push_back({{"name", g.name}, {"size", g.size}});
  doc["steps"] = ordered_json::array();
  for (const auto& step : scenario.steps) {
    ordered_json directives = ordered_json::array();
    for (const auto& d : step) {
      ordered_json entry = {{"op", std::string(to_string(d.op))}};
      if (!d.group.empty()) entry["group"] = d.group;
      if (!d.groups.empty()) entry["groups"] = d.groups;
      if (!d.name.empty()) entry["name"] = d.name;
      if (!d.target.empty()) entry["target"] = d.target;
      if (d.size) entry["size"] = d.size;
      if (d.by) entry["by"] = d.by;
      if (!d.parts.empty()) {
        entry["parts"] = ordered_json::array();
        for (const auto& p : d.parts) entry["parts"].push_back({{"name", p.name}, {"size", p.size}});
      }
      directives.push_back(std::move(entry));
    }
    doc["steps"].push_back(std::move(directives));
  }
  out << doc.dump(2) << '\n';
}

Generated generate(const Scenario& scenario, std::uint64_t seed, const sgci::Parameters& sgci) {
  scenario.validate();
  sgci.validate();
  return Generator(scenario, seed).run(sgci);
}

tempnet::InteractionLog to_interactions(const Generated& generated, std::int64_t window_length) {
  if (window_length <= 0) throw ParameterError("window length must be positive");
  std::vector<tempnet::Interaction> records;
  for (std::size_t f = 0; f < generated.graphs.size(); ++f) {
    const auto& g = generated.graphs[f];
    for (const auto& arc : g.arcs()) {
      records.push_back({g.node_name(arc.source), g.node_name(arc.target),
                         static_cast<std::int64_t>(f) * window_length, arc.weight});
    }
  }
  return tempnet::InteractionLog(std::move(records));
}

RecoveryScore score_ged(const std::vector<std::vector<Community>>& truth_frames,
                        const std::vector<ged::TransitionEvent>& truth,
                        const std::vector<std::vector<Community>>& detected_frames,
                        const std::vector<ged::TransitionEvent>& detected) {
  return compare(ged_keys(truth_frames, truth), ged_keys(detected_frames, detected));
}

RecoveryScore score_sgci(const std::vector<std::vector<Community>>& truth_frames,
                         const std::vector<sgci::StateLabel>& truth,
                         const std::vector<std::vector<Community>>& detected_frames,
                         const std::vector<sgci::StateLabel>& detected) {
  using Key = std::tuple<std::size_t, Members, std::string>;
  auto keys = [](const std::vector<std::vector<Community>>& frames, const std::vector<sgci::StateLabel>& labels) {
    std::multiset<Key> out;
    for (const auto& l : labels) {
      out.insert({l.group.frame, frames.at(l.group.frame).at(l.group.id).members,
                  std::string(sgci::to_string(l.dominating()))});
    }
    return out;
  };
  return compare(keys(truth_frames, truth), keys(detected_frames, detected));
}

std::string_view to_string(HistoryRule rule) {
  switch (rule) {
    case HistoryRule::cycle: return "cycle";
    case HistoryRule::shrink_shrink_grow: return "shrink_shrink_grow";
    case HistoryRule::memoryless: return "memoryless";
  }
  return "unknown";
}

HistoryRule history_rule_from_string(std::string_view text) {
  for (auto rule : {HistoryRule::cycle, HistoryRule::shrink_shrink_grow, HistoryRule::memoryless}) {
    if (to_string(rule) == text) return rule;
  }
  throw ConfigError("unknown history rule '" + std::string(text) + "'");
}

Scenario history_scenario(const HistoryOptions& options, std::uint64_t seed) {
  if (options.frames < 3) throw ParameterError("the history scenario needs at least three frames");
  if (options.min_size == 0 || options.min_size > options.max_size || options.min_step == 0 ||
      options.min_step > options.max_step) {
    throw ParameterError("invalid size or step range");
  }
  if (!(options.noise >= 0.0 && options.noise <= 1.0)) throw ParameterError("history noise must lie in [0, 1]");
  Rng rng(seed);
  Scenario s;
  s.taxonomy = Taxonomy::ged;
  s.p_in = options.p_in;
  s.p_out = options.p_out;
  s.steps.resize(options.frames - 1);
  auto draw = [&](std::size_t lo, std::size_t hi) { return lo + uniform_index(rng, hi - lo + 1); };
  for (std::size_t g = 0; g < options.groups; ++g) {
    const std::string name = "g" + std::to_string(g);
    std::size_t size = draw(options.min_size, options.max_size);
    s.initial.push_back({name, size});
    const int first = static_cast<int>(uniform_index(rng, 3));
    const int second = static_cast<int>(uniform_index(rng, 3));
    int previous = 0;
    int last = 0;
    for (std::size_t n = 0; n + 1 < options.frames; ++n) {
      int event = n == 0 ? first : n == 1 ? second : next_event(options.rule, previous, last, rng);
      if (n >= 2 && options.noise > 0.0 && uniform01(rng) < options.noise) {
        event = static_cast<int>(uniform_index(rng, 3));
      }
      if (event == 2 && size <= options.max_step + 2) event = 0;
      previous = last;
      last = event;
      Directive d;
      d.group = name;
      if (event == 1) {
        d.op = Op::grow;
        d.by = draw(options.min_step, options.max_step);
        size += d.by;
      } else if (event == 2) {
        d.op = Op::shrink;
        d.by = draw(options.min_step, options.max_step);
        size -= d.by;
      } else {
        d.op = Op::continue_;
      }
      s.steps[n].push_back(std::move(d));
    }
  }
  return s;
}

double bayes_accuracy(HistoryRule rule, std::size_t visible, double noise) {
  if (!(noise >= 0.0 && noise <= 1.0)) throw ParameterError("history noise must lie in [0, 1]");
  if (rule == HistoryRule::memoryless) return 1.0 / 3.0;
  if (visible >= 2) return (1.0 - noise) + noise / 3.0;
  // Tally the next event over the nine equally likely (previous, last) pairs.
  Rng unused(0);
  std::map<int, std::array<int, 3>> counts;
  for (int previous = 0; previous < 3; ++previous) {
    for (int last = 0; last < 3; ++last) {
      const int key = visible == 1 ? last : 0;
      ++counts[key][static_cast<std::size_t>(next_event(rule, previous, last, unused))];
    }
  }
  int correct = 0;
  for (const auto& [key, tally] : counts) correct += *std::max_element(tally.begin(), tally.end());
  return (1.0 - noise) * correct / 9.0 + noise / 3.0;
}

}  // namespace evochain::synth
