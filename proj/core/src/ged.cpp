#include "evochain/ged.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <ostream>

#include "evochain/error.hpp"
#include "json.hpp"

namespace evochain::ged {

using nlohmann::json;

namespace {

constexpr std::array<Event, 7> kEvents = {Event::forming,   Event::dissolving, Event::continuing,
                                          Event::growing,   Event::shrinking,  Event::merging,
                                          Event::splitting};

double importance_of(const Importance& importance, const std::string& node) {
  auto it = importance.find(node);
  if (it == importance.end()) throw IntegrityError("no importance for node '" + node + "'");
  return it->second;
}

double one_way(std::span<const std::string> group, const Importance& importance,
               std::span<const std::string> other) {
  std::size_t common = 0;
  double common_weight = 0.0;
  double total_weight = 0.0;
  auto j = other.begin();
  for (const auto& member : group) {
    const double weight = importance_of(importance, member);
    total_weight += weight;
    while (j != other.end() && *j < member) ++j;
    if (j != other.end() && *j == member) {
      ++common;
      common_weight += weight;
    }
  }
  if (!(total_weight > 0.0)) throw ParameterError("group importance must be positive");
  return 100.0 * (static_cast<double>(common) / static_cast<double>(group.size())) *
         (common_weight / total_weight);
}

}  // namespace

std::string_view to_string(Event event) {
  switch (event) {
    case Event::forming: return "forming";
    case Event::dissolving: return "dissolving";
    case Event::continuing: return "continuing";
    case Event::growing: return "growing";
    case Event::shrinking: return "shrinking";
    case Event::merging: return "merging";
    case Event::splitting: return "splitting";
  }
  return "unknown";
}

Event event_from_string(std::string_view label) {
  for (Event event : kEvents) {
    if (to_string(event) == label) return event;
  }
  throw ParseError(0, "unknown GED event '" + std::string(label) + "'");
}

std::span<const Event> all_events() { return kEvents; }

Importance importance_from_scores(const SnapshotGraph& graph, std::span<const double> scores) {
  if (scores.size() != graph.node_count()) {
    throw IntegrityError("importance scores do not match the snapshot");
  }
  Importance importance;
  importance.reserve(scores.size());
  for (NodeIndex v = 0; v < graph.node_count(); ++v) importance[graph.node_name(v)] = scores[v];
  return importance;
}

Inclusion inclusion(std::span<const std::string> earlier, const Importance& earlier_importance,
                    std::span<const std::string> later, const Importance& later_importance) {
  if (earlier.empty() || later.empty()) throw ParameterError("inclusion of an empty group");
  return {one_way(earlier, earlier_importance, later), one_way(later, later_importance, earlier)};
}

void Thresholds::validate() const {
  if (!(alpha > 0.0 && alpha <= 100.0) || !(beta > 0.0 && beta <= 100.0)) {
    throw ParameterError("GED thresholds must lie in (0, 100]");
  }
}

PairMatch classify_pair(std::size_t earlier_size, std::size_t later_size, const Inclusion& inc,
                        const Thresholds& thresholds) {
  const bool alpha_ok = inc.alpha >= thresholds.alpha;
  const bool beta_ok = inc.beta >= thresholds.beta;
  if (alpha_ok && beta_ok) {
    if (earlier_size == later_size) return PairMatch::continuing;
    return earlier_size < later_size ? PairMatch::growing : PairMatch::shrinking;
  }
  if (alpha_ok && earlier_size <= later_size) return PairMatch::merging_candidate;
  if (beta_ok && earlier_size >= later_size) return PairMatch::splitting_candidate;
  return PairMatch::none;
}

std::vector<TransitionEvent> detect_events(std::span<const std::vector<Community>> frames,
                                           std::span<const Importance> importances,
                                           const Thresholds& thresholds) {
  thresholds.validate();
  if (importances.size() != frames.size()) {
    throw IntegrityError("one importance map per frame is required");
  }
  std::vector<TransitionEvent> events;
  for (std::size_t n = 0; n + 1 < frames.size(); ++n) {
    const auto& earlier = frames[n];
    const auto& later = frames[n + 1];

    struct Pair {
      std::size_t from;
      std::size_t to;
      PairMatch match;
      Inclusion inc;
    };
    std::vector<Pair> pairs;
    std::vector<std::size_t> successors(earlier.size(), 0);
    std::vector<std::size_t> predecessors(later.size(), 0);
    for (std::size_t i = 0; i < earlier.size(); ++i) {
      for (std::size_t j = 0; j < later.size(); ++j) {
        // Disjoint groups have zero inclusion both ways.
        if (intersection_size(earlier[i].members, later[j].members) == 0) continue;
        Inclusion inc = inclusion(earlier[i].members, importances[n], later[j].members,
                                  importances[n + 1]);
        PairMatch match =
            classify_pair(earlier[i].members.size(), later[j].members.size(), inc, thresholds);
        if (match == PairMatch::none) continue;
        pairs.push_back({i, j, match, inc});
        ++successors[i];
        ++predecessors[j];
      }
    }

    for (const Pair& pair : pairs) {
      Event event = Event::continuing;
      if (successors[pair.from] >= 2) {
        event = Event::splitting;
      } else if (predecessors[pair.to] >= 2) {
        event = Event::merging;
      } else {
        switch (pair.match) {
          case PairMatch::continuing: event = Event::continuing; break;
          case PairMatch::growing:
          case PairMatch::merging_candidate: event = Event::growing; break;
          case PairMatch::shrinking:
          case PairMatch::splitting_candidate: event = Event::shrinking; break;
          case PairMatch::none: continue;
        }
      }
      events.push_back({earlier[pair.from].ref(), later[pair.to].ref(), event, pair.inc});
    }
    for (std::size_t i = 0; i < earlier.size(); ++i) {
      if (successors[i] == 0) events.push_back({earlier[i].ref(), std::nullopt, Event::dissolving, std::nullopt});
    }
    for (std::size_t j = 0; j < later.size(); ++j) {
      if (predecessors[j] == 0) events.push_back({std::nullopt, later[j].ref(), Event::forming, std::nullopt});
    }
  }
  return events;
}

void write_event(std::ostream& out, const TransitionEvent& event) {
  json object;
  object["from_frame"] = event.from ? json(event.from->frame) : json(nullptr);
  object["from_id"] = event.from ? json(event.from->id) : json(nullptr);
  object["to_frame"] = event.to ? json(event.to->frame) : json(nullptr);
  object["to_id"] = event.to ? json(event.to->id) : json(nullptr);
  object["event"] = std::string(to_string(event.event));
  object["alpha"] = event.inclusion ? json(event.inclusion->alpha) : json(nullptr);
  object["beta"] = event.inclusion ? json(event.inclusion->beta) : json(nullptr);
  // Keep the documented field order rather than nlohmann's sorted keys.
  out << "{\"from_frame\":" << object["from_frame"].dump() << ",\"from_id\":"
      << object["from_id"].dump() << ",\"to_frame\":" << object["to_frame"].dump()
      << ",\"to_id\":" << object["to_id"].dump() << ",\"event\":" << object["event"].dump()
      << ",\"alpha\":" << object["alpha"].dump() << ",\"beta\":" << object["beta"].dump()
      << "}\n";
}

TransitionEvent parse_event(std::string_view line) {
  try {
    json object = json::parse(line);
    TransitionEvent event;
    if (!object.at("from_frame").is_null()) {
      event.from = GroupRef{object.at("from_frame").get<std::size_t>(),
                            object.at("from_id").get<std::size_t>()};
    }
    if (!object.at("to_frame").is_null()) {
      event.to = GroupRef{object.at("to_frame").get<std::size_t>(),
                          object.at("to_id").get<std::size_t>()};
    }
    event.event = event_from_string(object.at("event").get<std::string>());
    if (!object.at("alpha").is_null()) {
      event.inclusion = Inclusion{object.at("alpha").get<double>(), object.at("beta").get<double>()};
    }
    return event;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed event record: ") + e.what());
  }
}

std::vector<TransitionEvent> read_events(std::istream& in) {
  std::vector<TransitionEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    try {
      events.push_back(parse_event(line));
    } catch (const ParseError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return events;
}

}  // namespace evochain::ged
