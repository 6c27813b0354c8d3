#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evochain/graph.hpp"
#include "evochain/types.hpp"

/// Group Evolution Discovery: transitions between consecutive frames are
/// found and labelled from a pair of importance-weighted inclusion measures.
namespace evochain::ged {

enum class Event { forming, dissolving, continuing, growing, shrinking, merging, splitting };

std::string_view to_string(Event event);
/// Throws ParseError for unknown labels.
Event event_from_string(std::string_view label);
/// All labels in declaration order.
std::span<const Event> all_events();

/// Node importance within one frame, keyed by node name.
using Importance = std::unordered_map<std::string, double>;

/// Importance from per-node social position scores of a snapshot.
Importance importance_from_scores(const SnapshotGraph& graph, std::span<const double> scores);

/// alpha = 100 * |G1 ∩ G2| / |G1| * imp1(G1 ∩ G2) / imp1(G1); beta is the
/// same with the roles swapped and importance taken in G2's frame.
/// Throws ParameterError for empty groups, IntegrityError for members without
/// importance.
Inclusion inclusion(std::span<const std::string> earlier, const Importance& earlier_importance,
                    std::span<const std::string> later, const Importance& later_importance);

struct Thresholds {
  double alpha = 50.0;
  double beta = 50.0;

  void validate() const;
};

enum class PairMatch {
  none,
  continuing,
  growing,
  shrinking,
  merging_candidate,
  splitting_candidate,
};

/// Rule table for one (earlier, later) pair. Both inclusions passing yields
/// continuing/growing/shrinking by size. Only alpha passing with the earlier
/// group no larger gives a merging candidate; only beta passing with the
/// earlier group no smaller gives a splitting candidate. Anything else is no
/// match.
PairMatch classify_pair(std::size_t earlier_size, std::size_t later_size, const Inclusion& inc,
                        const Thresholds& thresholds);

struct TransitionEvent {
  std::optional<GroupRef> from;
  std::optional<GroupRef> to;
  Event event = Event::continuing;
  std::optional<Inclusion> inclusion;

  bool operator==(const TransitionEvent&) const = default;
};

/// Evaluates every pair of consecutive-frame communities. A group matched to
/// two or more successors yields one splitting event per successor; a group
/// with two or more matched predecessors yields one merging event per
/// predecessor (splitting wins when both apply). A lone merging candidate is
/// growth and a lone splitting candidate is shrinkage. Unmatched groups
/// dissolve (frame n) or form (frame n + 1).
///
/// `frames[f]` lists frame f's communities ordered by id; `importances[f]`
/// covers every member of frame f.
std::vector<TransitionEvent> detect_events(std::span<const std::vector<Community>> frames,
                                           std::span<const Importance> importances,
                                           const Thresholds& thresholds);

/// JSON lines: {"from_frame","from_id","to_frame","to_id","event","alpha","beta"}
/// with nulls for absent endpoints or inclusion.
void write_event(std::ostream& out, const TransitionEvent& event);
TransitionEvent parse_event(std::string_view line);
std::vector<TransitionEvent> read_events(std::istream& in);

}  // namespace evochain::ged
