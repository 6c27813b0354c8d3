#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "evochain/ged.hpp"
#include "evochain/graph.hpp"
#include "evochain/sgci.hpp"
#include "evochain/tempnet.hpp"
#include "evochain/types.hpp"

/// Synthetic evolving groups with planted events, used as ground truth for
/// the trackers and the end-to-end pipeline.
namespace evochain::synth {

enum class Taxonomy { ged, sgci };

enum class Op {
  form,
  continue_,
  grow,
  shrink,
  split,
  merge,
  dissolve,
  detach,       // sgci only
  attach,       // sgci only
  split_merge,  // sgci only
};

std::string_view to_string(Op op);

struct GroupSpec {
  std::string name;
  std::size_t size = 0;
};

/// One scripted change between consecutive frames. Field use per op:
///   form        name, size
///   continue    group
///   grow/shrink group, by
///   split       group, parts (sizes sum to the group size)
///   merge       groups, name (the merged group)
///   dissolve    group
///   detach      group, name, size (members leaving as a new group)
///   attach      group (joins) target (host)
///   split_merge group, parts[0] (the kept part), target (partner), name
///               (partner plus the rest of group)
struct Directive {
  Op op = Op::continue_;
  std::string group;
  std::vector<std::string> groups;
  std::string name;
  std::string target;
  std::size_t size = 0;
  std::size_t by = 0;
  std::vector<GroupSpec> parts;
};

struct Scenario {
  Taxonomy taxonomy = Taxonomy::ged;
  std::vector<GroupSpec> initial;
  /// steps[n] turns frame n into frame n + 1; unmentioned groups continue.
  std::vector<std::vector<Directive>> steps;
  double p_in = 0.9;
  double p_out = 0.02;
  /// Probability that a member is replaced by a fresh node after each step.
  double churn = 0.0;

  /// Throws ParameterError naming the step and directive index.
  void validate() const;
};

/// JSON: {"taxonomy","initial":[{"name","size"}],"steps":[[{"op",...}]],
/// "p_in","p_out","churn"}. Throws ParseError on malformed JSON.
Scenario parse_scenario(std::string_view text);
Scenario read_scenario(std::istream& in);
void write_scenario(std::ostream& out, const Scenario& scenario);

struct Generated {
  std::vector<SnapshotGraph> graphs;
  /// Per frame, ids assigned by size then members.
  std::vector<std::vector<Community>> communities;
  /// Planted GED events between consecutive frames (GED scenarios).
  std::vector<ged::TransitionEvent> ged_truth;
  /// Planted dominating labels of stable states (SGCI scenarios). A state is
  /// stable when it lies on a planted lineage of at least min_stability
  /// frames whose links keep overlap / larger size at or above the match
  /// threshold.
  std::vector<sgci::StateLabel> sgci_truth;
};

/// Realizes the scenario. Each group becomes a block with arc probability
/// p_in (every member keeps at least one arc), plus background arcs with
/// probability p_out. Node names are "n00001", "n00002", ...
Generated generate(const Scenario& scenario, std::uint64_t seed, const sgci::Parameters& sgci = {});

/// Interactions with every arc of frame f stamped at f * window_length, so
/// disjoint windows of that length recover the snapshots.
tempnet::InteractionLog to_interactions(const Generated& generated, std::int64_t window_length);

struct RecoveryScore {
  std::size_t truth = 0;
  std::size_t detected = 0;
  std::size_t matched = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

/// Event-level agreement, matching events by the member sets of their
/// endpoints and their label, so the two sides may number groups
/// differently. Forming events into the first frame are ignored.
RecoveryScore score_ged(const std::vector<std::vector<Community>>& truth_frames,
                        const std::vector<ged::TransitionEvent>& truth,
                        const std::vector<std::vector<Community>>& detected_frames,
                        const std::vector<ged::TransitionEvent>& detected);

/// Agreement of dominating labels per state, matched by frame and members.
RecoveryScore score_sgci(const std::vector<std::vector<Community>>& truth_frames,
                         const std::vector<sgci::StateLabel>& truth,
                         const std::vector<std::vector<Community>>& detected_frames,
                         const std::vector<sgci::StateLabel>& detected);

/// Next-event rules over {continue, grow, shrink} for the history scenario.
enum class HistoryRule {
  /// Follows the cyclic sequence 0,0,1,1,2,2,0,2,1 (continue, grow, shrink),
  /// where every ordered pair occurs once: the last two events fix the next
  /// one while the last event alone leaves three equally likely choices.
  cycle,
  /// grow after (shrink, shrink), otherwise continue.
  shrink_shrink_grow,
  /// Independent uniform draws.
  memoryless,
};

std::string_view to_string(HistoryRule rule);
HistoryRule history_rule_from_string(std::string_view text);

struct HistoryOptions {
  HistoryRule rule = HistoryRule::cycle;
  std::size_t groups = 30;
  std::size_t frames = 14;
  std::size_t min_size = 18;
  std::size_t max_size = 26;
  std::size_t min_step = 1;
  std::size_t max_step = 2;
  double p_in = 0.9;
  double p_out = 0.02;
  /// Probability that an event after the first two is drawn uniformly
  /// instead of from the rule. Above zero, older events tell less about the
  /// next one than recent events do.
  double noise = 0.0;
};

/// GED scenario whose groups only continue, grow or shrink, starting from a
/// random pair of events and following `rule` from then on.
Scenario history_scenario(const HistoryOptions& options, std::uint64_t seed);

/// Best achievable accuracy when predicting the next event from the last
/// `visible` events, with the starting pair uniformly distributed and a
/// `noise` share of uniformly drawn events.
double bayes_accuracy(HistoryRule rule, std::size_t visible, double noise = 0.0);

}  // namespace evochain::synth
