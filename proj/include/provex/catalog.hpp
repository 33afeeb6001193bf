#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "provex/graph.hpp"

namespace provex {

// The four plan dimensions. Source classes use a "pred:<predicate>" key for
// belief and goal predicates and "disc:<tag>" for discipline tags; operation
// classes are keyed by operator name.
struct Catalog {
  std::set<NodeId> agents;
  std::set<NodeId> source_entities;
  std::map<std::string, std::set<NodeId>> source_classes;
  std::map<std::string, std::set<NodeId>> operation_classes;

  bool operator==(const Catalog&) const = default;
};

Catalog build_catalog(const ProvGraph& graph);

enum class Dimension { Agents, Sources, SourceClasses, OperationClasses };
// Accepts "agents", "sources", "source_classes", "operation_classes" and the
// short forms "agent", "source", "class", "op".
std::optional<Dimension> parse_dimension(std::string_view text);
std::string_view to_string(Dimension dimension);

// Members of one class. For source classes a bare key is tried as given, then
// with the "disc:" and "pred:" prefixes. Throws UnknownClass.
std::set<NodeId> class_members(const Catalog& catalog, Dimension dimension, const std::string& key);

// "dimension:key", split at the first colon. Throws UnknownClass.
std::set<NodeId> resolve_selector(const Catalog& catalog, std::string_view selector);

nlohmann::json to_json(const Catalog& catalog);

}  // namespace provex
