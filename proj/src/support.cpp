#include "provex/support.hpp"

#include <algorithm>
#include <deque>

#include "provex/error.hpp"

namespace provex {

namespace {

void sort_unique(std::vector<NodeIndex>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

SupportModel build_support_model(const ProvGraph& graph) {
  const std::size_t n = graph.node_count();
  SupportModel model;
  model.alternatives.resize(n);
  model.dependents.resize(n);

  std::vector<std::vector<NodeIndex>> activity_members(n), generators(n), parents(n);
  for (const auto& edge : graph.edges()) {
    auto from = graph.index_of(edge.from);
    auto to = graph.index_of(edge.to);
    if (!from || !to) throw Error(ErrorCode::MissingEndpoint, "edge endpoint missing: " + edge.from + " -> " + edge.to);
    switch (edge.relation) {
      case Relation::Used:
      case Relation::WasAssociatedWith: activity_members[*from].push_back(*to); break;
      case Relation::WasGeneratedBy: generators[*from].push_back(*to); break;
      case Relation::WasDerivedFrom: parents[*from].push_back(*to); break;
      default: break;
    }
  }

  for (NodeIndex i = 0; i < n; ++i) {
    auto& alts = model.alternatives[i];
    switch (graph.node(i).kind) {
      case NodeKind::Activity:
        sort_unique(activity_members[i]);
        if (!activity_members[i].empty()) alts.push_back(std::move(activity_members[i]));
        break;
      case NodeKind::Entity:
        sort_unique(generators[i]);
        for (NodeIndex g : generators[i]) alts.push_back({g});
        sort_unique(parents[i]);
        if (!parents[i].empty()) alts.push_back(std::move(parents[i]));
        break;
      case NodeKind::Agent: break;
    }
    std::vector<NodeIndex> members;
    for (const auto& alt : alts) members.insert(members.end(), alt.begin(), alt.end());
    sort_unique(members);
    for (NodeIndex m : members) model.dependents[m].push_back(i);
  }

  // Kahn's algorithm over "depends on"; ties broken by node index.
  std::vector<std::size_t> pending(n, 0);
  for (NodeIndex i = 0; i < n; ++i)
    for (NodeIndex d : model.dependents[i]) ++pending[d];
  std::deque<NodeIndex> ready;
  for (NodeIndex i = 0; i < n; ++i)
    if (pending[i] == 0) ready.push_back(i);
  model.order.reserve(n);
  while (!ready.empty()) {
    const NodeIndex i = ready.front();
    ready.pop_front();
    model.order.push_back(i);
    for (NodeIndex d : model.dependents[i])
      if (--pending[d] == 0) ready.push_back(d);
  }
  if (model.order.size() != n) {
    for (NodeIndex i = 0; i < n; ++i)
      if (pending[i] != 0) throw Error(ErrorCode::CyclicSupport, "support cycle through " + graph.node(i).id);
  }

  auto by_id = [&](NodeIndex a, NodeIndex b) { return graph.node(a).id < graph.node(b).id; };
  for (NodeIndex i = 0; i < n; ++i) {
    if (model.alternatives[i].empty()) model.roots.push_back(i);
    if (model.dependents[i].empty()) model.sinks.push_back(i);
  }
  std::sort(model.roots.begin(), model.roots.end(), by_id);
  std::sort(model.sinks.begin(), model.sinks.end(), by_id);
  return model;
}

SupportRules support_rules(const ProvGraph& graph) {
  const auto model = build_support_model(graph);
  SupportRules rules;
  for (NodeIndex i = 0; i < model.size(); ++i) {
    auto& out = rules[graph.node(i).id];
    for (const auto& alt : model.alternatives[i]) {
      std::set<NodeId> members;
      for (NodeIndex m : alt) members.insert(graph.node(m).id);
      out.push_back(std::move(members));
    }
  }
  return rules;
}

}  // namespace provex
