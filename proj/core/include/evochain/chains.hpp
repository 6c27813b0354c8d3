#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evochain/dataset.hpp"
#include "evochain/ged.hpp"
#include "evochain/sgci.hpp"
#include "evochain/types.hpp"

/// Evolution chains: the last L states of a group's history together with
/// the event that followed, and their conversion into a labelled dataset.
namespace evochain::chains {

enum class Method { ged, sgci };

std::string_view to_string(Method method);
/// Accepts "ged" or "sgci" in any case; throws ConfigError otherwise.
Method method_from_string(std::string_view text);

struct TransitionLink {
  GroupRef from;
  GroupRef to;
  std::string event;
  std::optional<Inclusion> inclusion;
};

/// History edges and the events that follow each group.
struct TransitionGraph {
  Method method = Method::ged;
  /// Links usable as chain history, keyed by their later endpoint and
  /// ordered by earlier endpoint.
  std::map<GroupRef, std::vector<TransitionLink>> incoming;
  /// Labels to predict for each focal group, one chain family per entry.
  std::map<GroupRef, std::vector<std::string>> targets;
};

/// GED: every event with both endpoints is a history link, and every event
/// leaving a group (dissolving included) is a target.
TransitionGraph from_ged(std::span<const ged::TransitionEvent> events);

/// SGCI: consecutive states of stable groups are history links and each
/// labelled state's dominating event is its single target.
TransitionGraph from_sgci(std::span<const sgci::StableGroup> stable,
                          std::span<const sgci::StateLabel> labels);

struct EvolutionChain {
  /// Oldest first, ending at the focal group.
  std::vector<GroupRef> states;
  /// Event label of each link between consecutive states.
  std::vector<std::string> transitions;
  /// Inclusion of each link (GED only).
  std::vector<Inclusion> inclusions;
  std::string target;

  bool operator==(const EvolutionChain&) const = default;
};

/// Every backward path of exactly `length` states ending at a focal group,
/// once per target of that group. Chains are ordered by focal group, target
/// position and path. Throws ParameterError for length < 2.
std::vector<EvolutionChain> build_chains(const TransitionGraph& graph, std::size_t length);

/// Stratified by target: keeps round(fraction * n) chains of every target
/// (at least one), in their original order. Throws ParameterError unless
/// 0 < fraction <= 1.
std::vector<EvolutionChain> sample_chains(std::span<const EvolutionChain> chains, double fraction,
                                          std::uint64_t seed);

/// Structural profiles (29 values, SGCI layout) per group state.
using ProfileTable = std::map<GroupRef, std::vector<double>>;

/// Feature names for chains of `length` states: "t-<age>_<measure>" per
/// state, oldest first; GED appends "event_t-<a>_t-<b>" per link.
std::vector<FeatureInfo> chain_schema(Method method, std::size_t length);

/// One row per chain. In GED mode each state profile is extended with the
/// alpha and beta of the link leaving that state (the last state reuses its
/// incoming link), and the link events follow as categorical features.
/// Throws IntegrityError naming the frame and group of a missing profile.
Dataset assemble_dataset(std::span<const EvolutionChain> chains, const ProfileTable& profiles,
                         Method method, std::size_t length);

/// JSON lines {"states":[[f,id],...],"transitions":[...],"inclusions":[[a,b],...],"target":...}.
void write_chains(std::ostream& out, std::span<const EvolutionChain> chains);
std::vector<EvolutionChain> read_chains(std::istream& in);

}  // namespace evochain::chains
