#include "evochain/types.hpp"

#include <algorithm>

namespace evochain {

std::string to_string(const GroupRef& ref) {
  return "frame " + std::to_string(ref.frame) + " group " + std::to_string(ref.id);
}

std::size_t intersection_size(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

void assign_community_ids(std::vector<Community>& communities) {
  std::sort(communities.begin(), communities.end(), [](const Community& a, const Community& b) {
    if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
    return a.members < b.members;
  });
  for (std::size_t i = 0; i < communities.size(); ++i) communities[i].id = i;
}

}  // namespace evochain
