#include "evochain/sgci.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "evochain/error.hpp"
#include "json.hpp"

namespace evochain::sgci {

using nlohmann::json;

namespace {

constexpr std::array<Event, kEventCount> kEvents = {
    Event::constancy, Event::change_size, Event::split,       Event::merge,
    Event::addition,  Event::deletion,    Event::split_merge, Event::decay};

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ParameterError("match threshold must lie in (0, 1]");
  }
}

json ref_or_null(const std::optional<GroupRef>& ref, bool frame) {
  if (!ref) return nullptr;
  return frame ? ref->frame : ref->id;
}

}  // namespace

std::string_view to_string(Event event) {
  switch (event) {
    case Event::constancy: return "constancy";
    case Event::change_size: return "change_size";
    case Event::split: return "split";
    case Event::merge: return "merge";
    case Event::addition: return "addition";
    case Event::deletion: return "deletion";
    case Event::split_merge: return "split_merge";
    case Event::decay: return "decay";
  }
  return "unknown";
}

Event event_from_string(std::string_view label) {
  for (Event event : kEvents) {
    if (to_string(event) == label) return event;
  }
  throw ParseError(0, "unknown SGCI event '" + std::string(label) + "'");
}

int priority(Event event) { return static_cast<int>(event) + 1; }

std::span<const Event> all_events() { return kEvents; }

EventSet::EventSet(std::initializer_list<Event> events) {
  for (Event event : events) insert(event);
}

std::size_t EventSet::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

EventSet EventSet::from_bits(std::uint8_t bits) {
  EventSet set;
  set.bits_ = bits;
  return set;
}

std::vector<Event> EventSet::events() const {
  std::vector<Event> out;
  for (Event event : kEvents) {
    if (contains(event)) out.push_back(event);
  }
  return out;
}

Event dominating_event(const EventSet& events) {
  if (events.empty()) throw ParameterError("dominating event of an empty event set");
  return static_cast<Event>(std::countr_zero(events.bits()));
}

double match_score(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) throw ParameterError("match score of an empty group");
  return static_cast<double>(intersection_size(a, b)) /
         static_cast<double>(std::max(a.size(), b.size()));
}

std::vector<Link> match_groups(std::span<const Community> earlier, std::span<const Community> later,
                               double threshold) {
  check_threshold(threshold);
  std::vector<Link> links;
  for (std::size_t i = 0; i < earlier.size(); ++i) {
    for (std::size_t j = 0; j < later.size(); ++j) {
      const double score = match_score(earlier[i].members, later[j].members);
      if (score >= threshold) links.push_back({i, j, score, false});
    }
  }
  return links;
}

std::vector<Link> fragment_links(std::span<const Community> earlier,
                                 std::span<const Community> later, double threshold,
                                 double small_ratio) {
  check_threshold(threshold);
  std::vector<Link> links;
  for (std::size_t i = 0; i < earlier.size(); ++i) {
    for (std::size_t j = 0; j < later.size(); ++j) {
      const auto& a = earlier[i].members;
      const auto& b = later[j].members;
      const std::size_t common = intersection_size(a, b);
      if (common == 0) continue;
      const double score = static_cast<double>(common) / static_cast<double>(std::max(a.size(), b.size()));
      if (score >= threshold) continue;
      const std::size_t small = std::min(a.size(), b.size());
      const std::size_t large = std::max(a.size(), b.size());
      if (static_cast<double>(small) >= small_ratio * static_cast<double>(large)) continue;
      if (static_cast<double>(common) / static_cast<double>(small) < threshold) continue;
      links.push_back({i, j, score, true});
    }
  }
  return links;
}

std::vector<StableGroup> identify_stable(std::span<const std::size_t> group_counts,
                                         std::span<const std::vector<Link>> matches,
                                         std::size_t min_stability) {
  if (min_stability < 2) throw ParameterError("min_stability must be at least 2");
  if (!group_counts.empty() && matches.size() + 1 != group_counts.size()) {
    throw IntegrityError("one match list per frame transition is required");
  }
  const std::size_t frames = group_counts.size();
  std::vector<std::vector<std::vector<std::size_t>>> next(frames);
  std::vector<std::vector<bool>> has_prev(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    next[f].resize(group_counts[f]);
    has_prev[f].assign(group_counts[f], false);
  }
  for (std::size_t n = 0; n + 1 < frames; ++n) {
    for (const Link& link : matches[n]) {
      if (link.fragment) continue;
      if (link.from >= group_counts[n] || link.to >= group_counts[n + 1]) {
        throw IntegrityError("match refers to an unknown group");
      }
      next[n][link.from].push_back(link.to);
      has_prev[n + 1][link.to] = true;
    }
  }
  for (auto& per_frame : next) {
    for (auto& successors : per_frame) std::sort(successors.begin(), successors.end());
  }

  std::vector<StableGroup> stable;
  std::vector<GroupRef> path;
  auto extend = [&](auto&& self, std::size_t frame, std::size_t id) -> void {
    path.push_back({frame, id});
    const auto& successors = next[frame][id];
    if (successors.empty()) {
      if (path.size() >= min_stability) stable.push_back({path});
    } else {
      for (std::size_t to : successors) self(self, frame + 1, to);
    }
    path.pop_back();
  };
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t id = 0; id < group_counts[f]; ++id) {
      if (!has_prev[f][id]) extend(extend, f, id);
    }
  }
  std::sort(stable.begin(), stable.end(),
            [](const StableGroup& a, const StableGroup& b) { return a.states < b.states; });
  return stable;
}

EventSet classify_events(const TransitionContext& context, double small_ratio) {
  const bool any_matched = std::any_of(context.successors.begin(), context.successors.end(),
                                       [](const Counterpart& c) { return c.matched; });
  if (!any_matched) return {Event::decay};

  EventSet events;
  const double own_floor = small_ratio * static_cast<double>(context.size);
  if (context.successors.size() == 1 && context.successors.front().predecessor_sizes.size() == 1) {
    events.insert(context.successors.front().size == context.size ? Event::constancy
                                                                   : Event::change_size);
  }
  if (context.successors.size() >= 2) {
    const auto comparable = std::count_if(
        context.successors.begin(), context.successors.end(),
        [&](const Counterpart& c) { return static_cast<double>(c.size) >= own_floor; });
    events.insert(comparable >= 2 ? Event::split : Event::deletion);
  }
  for (const Counterpart& successor : context.successors) {
    if (successor.predecessor_sizes.size() < 2) continue;
    const double floor = small_ratio * static_cast<double>(successor.size);
    const auto comparable =
        std::count_if(successor.predecessor_sizes.begin(), successor.predecessor_sizes.end(),
                      [&](std::size_t size) { return static_cast<double>(size) >= floor; });
    events.insert(comparable >= 2 ? Event::merge : Event::addition);
  }
  if (events.contains(Event::split) && events.contains(Event::merge)) {
    events.erase(Event::split);
    events.erase(Event::merge);
    events.insert(Event::split_merge);
  }
  return events;
}

void Parameters::validate() const {
  check_threshold(mj_threshold);
  if (min_stability < 2) throw ParameterError("min_stability must be at least 2");
  if (!(small_ratio > 0.0 && small_ratio < 1.0)) {
    throw ParameterError("small_ratio must lie in (0, 1)");
  }
}

Result detect_events(std::span<const std::vector<Community>> frames, const Parameters& params) {
  params.validate();
  Result result;
  if (frames.empty()) return result;

  std::vector<std::size_t> counts;
  for (const auto& frame : frames) counts.push_back(frame.size());
  std::vector<std::vector<Link>> matches(frames.size() - 1);
  std::vector<std::vector<Link>> links(frames.size() - 1);
  for (std::size_t n = 0; n + 1 < frames.size(); ++n) {
    matches[n] = match_groups(frames[n], frames[n + 1], params.mj_threshold);
    links[n] = matches[n];
    auto fragments = fragment_links(frames[n], frames[n + 1], params.mj_threshold, params.small_ratio);
    links[n].insert(links[n].end(), fragments.begin(), fragments.end());
  }
  result.stable = identify_stable(counts, matches, params.min_stability);

  std::map<GroupRef, bool> stable_states;
  for (const auto& group : result.stable) {
    for (const auto& state : group.states) {
      if (state.frame + 1 < frames.size()) stable_states[state] = true;
    }
  }

  for (const auto& [state, unused] : stable_states) {
    const std::size_t n = state.frame;
    const auto& transition = links[n];
    TransitionContext context;
    context.size = frames[n][state.id].members.size();
    std::optional<GroupRef> best;
    double best_score = -1.0;
    for (const Link& link : transition) {
      if (link.from != state.id) continue;
      Counterpart counterpart;
      counterpart.size = frames[n + 1][link.to].members.size();
      counterpart.matched = !link.fragment;
      for (const Link& other : transition) {
        if (other.to == link.to) counterpart.predecessor_sizes.push_back(frames[n][other.from].members.size());
      }
      context.successors.push_back(std::move(counterpart));
      if (!link.fragment &&
          (link.score > best_score || (link.score == best_score && best && link.to < best->id))) {
        best_score = link.score;
        best = GroupRef{n + 1, link.to};
      }
    }
    StateLabel label{state, std::nullopt, classify_events(context, params.small_ratio)};
    if (!label.events.contains(Event::decay)) label.successor = best;
    result.labels.push_back(label);
  }
  return result;
}

void write_labels(std::ostream& out, std::span<const StateLabel> labels) {
  for (const auto& label : labels) {
    const Event dominating = label.dominating();
    for (Event event : label.events.events()) {
      out << "{\"from_frame\":" << label.group.frame << ",\"from_id\":" << label.group.id
          << ",\"to_frame\":" << ref_or_null(label.successor, true).dump()
          << ",\"to_id\":" << ref_or_null(label.successor, false).dump() << ",\"event\":\""
          << to_string(event) << "\",\"alpha\":null,\"beta\":null,\"dominating\":"
          << (event == dominating ? "true" : "false") << "}\n";
    }
  }
}

std::vector<StateLabel> read_labels(std::istream& in) {
  std::vector<StateLabel> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    try {
      json object = json::parse(line);
      GroupRef group{object.at("from_frame").get<std::size_t>(), object.at("from_id").get<std::size_t>()};
      std::optional<GroupRef> successor;
      if (!object.at("to_frame").is_null()) {
        successor = GroupRef{object.at("to_frame").get<std::size_t>(), object.at("to_id").get<std::size_t>()};
      }
      const Event event = event_from_string(object.at("event").get<std::string>());
      if (labels.empty() || labels.back().group != group) {
        labels.push_back({group, successor, {}});
      } else if (labels.back().successor != successor) {
        throw ParseError(line_no, "inconsistent successor for " + to_string(group));
      }
      labels.back().events.insert(event);
      object.at("dominating").get<bool>();
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("malformed event record: ") + e.what());
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(line_no, e.what());
    }
  }
  return labels;
}

void write_stable(std::ostream& out, std::span<const StableGroup> stable) {
  for (const auto& group : stable) {
    out << "{\"states\":[";
    for (std::size_t i = 0; i < group.states.size(); ++i) {
      if (i) out << ',';
      out << '[' << group.states[i].frame << ',' << group.states[i].id << ']';
    }
    out << "]}\n";
  }
}

std::vector<StableGroup> read_stable(std::istream& in) {
  std::vector<StableGroup> stable;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    try {
      json object = json::parse(line);
      StableGroup group;
      for (const auto& state : object.at("states")) {
        group.states.push_back({state.at(0).get<std::size_t>(), state.at(1).get<std::size_t>()});
      }
      stable.push_back(std::move(group));
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("malformed stable group record: ") + e.what());
    }
  }
  return stable;
}

}  // namespace evochain::sgci
