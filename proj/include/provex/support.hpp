#pragma once

#include <map>
#include <set>
#include <vector>

#include "provex/graph.hpp"

namespace provex {

// AND/OR reading of the support relations. A node holds when every member of
// at least one of its alternatives holds; a node with no alternatives is a root.
//   Activity: one alternative, its Used entities plus its associated agents.
//   Entity:   one singleton alternative per generating activity, plus one
//             alternative made of all its WasDerivedFrom parents.
//   Agent:    root.
struct SupportModel {
  std::vector<std::vector<std::vector<NodeIndex>>> alternatives;
  std::vector<std::vector<NodeIndex>> dependents;
  std::vector<NodeIndex> order;  // every node after all of its supports
  std::vector<NodeIndex> roots;  // ascending id
  std::vector<NodeIndex> sinks;  // ascending id

  bool is_root(NodeIndex node) const { return alternatives[node].empty(); }
  std::size_t size() const { return alternatives.size(); }
};

// Throws CyclicSupport.
SupportModel build_support_model(const ProvGraph& graph);

using SupportRules = std::map<NodeId, std::vector<std::set<NodeId>>>;
SupportRules support_rules(const ProvGraph& graph);

}  // namespace provex
