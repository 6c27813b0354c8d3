#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "evochain/types.hpp"

/// Stable Group Changes Identification: groups are matched across frames by
/// overlap, lineages that persist long enough are kept, and each of their
/// transitions is labelled with a set of events and a dominating event.
namespace evochain::sgci {

/// Declared in priority order, highest first.
enum class Event : std::uint8_t {
  constancy,
  change_size,
  split,
  merge,
  addition,
  deletion,
  split_merge,
  decay,
};

inline constexpr std::size_t kEventCount = 8;

std::string_view to_string(Event event);
Event event_from_string(std::string_view label);
/// 1 for constancy through 8 for decay.
int priority(Event event);
std::span<const Event> all_events();

/// Small bit set over the eight events.
class EventSet {
 public:
  EventSet() = default;
  EventSet(std::initializer_list<Event> events);

  void insert(Event event) { bits_ |= bit(event); }
  void erase(Event event) { bits_ &= static_cast<std::uint8_t>(~bit(event)); }
  bool contains(Event event) const { return (bits_ & bit(event)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::size_t size() const;
  std::uint8_t bits() const { return bits_; }
  static EventSet from_bits(std::uint8_t bits);
  /// Members in priority order.
  std::vector<Event> events() const;

  bool operator==(const EventSet&) const = default;

 private:
  static std::uint8_t bit(Event event) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(event)); }
  std::uint8_t bits_ = 0;
};

/// Highest-priority member. Throws ParameterError on an empty set.
Event dominating_event(const EventSet& events);

/// |A ∩ B| / max(|A|, |B|). Throws ParameterError if either group is empty.
double match_score(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// A link between group `from` of frame n and group `to` of frame n + 1
/// (indices into the frame lists).
struct Link {
  std::size_t from = 0;
  std::size_t to = 0;
  double score = 0.0;
  /// True for a fragment link: a small group that is mostly contained in a
  /// much larger one without reaching the match threshold.
  bool fragment = false;

  bool operator==(const Link&) const = default;
};

/// Every pair with match_score >= threshold, many-to-many, ordered by
/// (from, to). Throws ParameterError unless 0 < threshold <= 1.
std::vector<Link> match_groups(std::span<const Community> earlier, std::span<const Community> later,
                               double threshold);

/// Pairs that are not matched but where the smaller group is below
/// `small_ratio` times the larger and at least `threshold` of the smaller
/// group lies in the larger one. They feed addition and deletion only.
std::vector<Link> fragment_links(std::span<const Community> earlier,
                                 std::span<const Community> later, double threshold,
                                 double small_ratio);

struct StableGroup {
  /// One state per consecutive frame, oldest first.
  std::vector<GroupRef> states;

  bool operator==(const StableGroup&) const = default;
};

/// Maximal paths of the match DAG with at least `min_stability` states.
/// `matches[n]` holds the matches between frames n and n + 1, and
/// `group_counts[f]` is the number of groups in frame f. Paths are listed in
/// lexicographic order of their state sequences. Throws ParameterError for
/// min_stability < 2.
std::vector<StableGroup> identify_stable(std::span<const std::size_t> group_counts,
                                         std::span<const std::vector<Link>> matches,
                                         std::size_t min_stability);

/// One successor of the classified group with the sizes of all groups that
/// link into it (the classified group included).
struct Counterpart {
  std::size_t size = 0;
  bool matched = false;
  std::vector<std::size_t> predecessor_sizes;
};

struct TransitionContext {
  std::size_t size = 0;
  std::vector<Counterpart> successors;
};

/// Event set of one transition. Decay without a matched successor;
/// constancy or change_size for a unique mutual link; split when at least two
/// successors reach small_ratio of the group, deletion when there are several
/// successors otherwise; merge when a successor has at least two
/// predecessors reaching small_ratio of it, addition when it has several
/// otherwise. A split and a merge together become split_merge.
EventSet classify_events(const TransitionContext& context, double small_ratio);

struct Parameters {
  double mj_threshold = 0.5;
  std::size_t min_stability = 3;
  double small_ratio = 0.05;

  void validate() const;
};

struct StateLabel {
  GroupRef group;
  /// Best matched successor (highest score, then lowest id); none on decay.
  std::optional<GroupRef> successor;
  EventSet events;

  Event dominating() const { return dominating_event(events); }
  bool operator==(const StateLabel&) const = default;
};

struct Result {
  std::vector<StableGroup> stable;
  /// Labels for every stable-group state outside the final frame, ordered
  /// by group reference.
  std::vector<StateLabel> labels;
};

/// `frames[f]` lists frame f's communities ordered by id.
Result detect_events(std::span<const std::vector<Community>> frames, const Parameters& params);

/// One JSON line per event of each label, in the tracker event layout:
/// {"from_frame","from_id","to_frame","to_id","event","alpha","beta","dominating"}.
void write_labels(std::ostream& out, std::span<const StateLabel> labels);
std::vector<StateLabel> read_labels(std::istream& in);

/// JSON lines {"states":[[frame,id],...]}.
void write_stable(std::ostream& out, std::span<const StableGroup> stable);
std::vector<StableGroup> read_stable(std::istream& in);

}  // namespace evochain::sgci
