#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace evochain {

/// Identifies one community state: its frame and its id within that frame.
struct GroupRef {
  std::size_t frame = 0;
  std::size_t id = 0;

  auto operator<=>(const GroupRef&) const = default;
};

std::string to_string(const GroupRef& ref);

/// GED inclusion pair, both in percent. `alpha` measures how much the earlier
/// group is contained in the later one, `beta` the reverse.
struct Inclusion {
  double alpha = 0.0;
  double beta = 0.0;

  bool operator==(const Inclusion&) const = default;
};

/// A detected or planted group inside one time frame. Members are sorted.
struct Community {
  std::size_t frame_index = 0;
  std::size_t id = 0;
  std::vector<std::string> members;

  GroupRef ref() const { return {frame_index, id}; }
  bool operator==(const Community&) const = default;
};

/// Number of common members of two sorted member lists.
std::size_t intersection_size(const std::vector<std::string>& a,
                              const std::vector<std::string>& b);

/// Orders communities by size descending then member list, and assigns ids
/// 0, 1, ... in that order.
void assign_community_ids(std::vector<Community>& communities);

}  // namespace evochain
