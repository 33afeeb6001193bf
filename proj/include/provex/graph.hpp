#pragma once

// PROV-DM subset used to represent plans: Entities, Activities and Agents
// connected by typed relations, plus appraisals attached to any node.

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace provex {

using NodeId = std::string;
using NodeIndex = std::uint32_t;

enum class NodeKind { Entity, Activity, Agent };
enum class NodeSubtype { Belief, InformationSource, Goal, Task, Actor };

enum class Relation {
  Used,               // Activity -> Entity
  WasGeneratedBy,     // Entity -> Activity
  WasAssociatedWith,  // Activity -> Agent
  WasDerivedFrom,     // Entity -> Entity
  WasInformedBy,      // Activity -> Activity
  ActedOnBehalfOf,    // Agent -> Agent
  WasAttributedTo,    // Entity -> Agent
};

std::string_view to_string(NodeKind kind);
std::string_view to_string(NodeSubtype subtype);
std::string_view to_string(Relation relation);
std::optional<NodeKind> parse_node_kind(std::string_view text);
std::optional<NodeSubtype> parse_node_subtype(std::string_view text);
std::optional<Relation> parse_relation(std::string_view text);

NodeKind kind_of(NodeSubtype subtype);

struct RelationSignature {
  NodeKind from;
  NodeKind to;
};
RelationSignature signature(Relation relation);

// Relations whose source node depends on its target for support.
bool is_support_relation(Relation relation);
// Relations covered by the acyclicity invariant: Used, WasGeneratedBy,
// WasDerivedFrom and WasInformedBy.
bool is_ordering_relation(Relation relation);

struct ProvNode {
  NodeId id;
  NodeKind kind = NodeKind::Entity;
  NodeSubtype subtype = NodeSubtype::Belief;
  std::string label;
  nlohmann::json attributes = nlohmann::json::object();

  bool operator==(const ProvNode&) const = default;
};

struct ProvEdge {
  NodeId from;
  NodeId to;
  Relation relation = Relation::Used;

  auto operator<=>(const ProvEdge&) const = default;
};

inline constexpr std::string_view kAnalystAppraiser = "analyst";

struct Appraisal {
  std::string appraiser{kAnalystAppraiser};
  NodeId subject;
  std::optional<double> confidence;
  std::vector<std::string> assumptions;
  std::vector<std::string> disciplines;

  bool operator==(const Appraisal&) const = default;
};

struct Violation {
  std::string rule;     // e.g. "MissingEndpoint", "KindMismatch"
  std::string subject;  // offending node id or "from -[relation]-> to"
  std::string message;

  bool operator==(const Violation&) const = default;
};

class ProvGraph {
 public:
  ProvGraph() = default;

  // Bulk construction without per-element checks; pair with validate().
  static ProvGraph from_parts(std::vector<ProvNode> nodes,
                              std::vector<ProvEdge> edges,
                              std::vector<Appraisal> appraisals);

  // Throws DuplicateId.
  void add_node(ProvNode node);
  // Throws MissingEndpoint, KindMismatch, CycleIntroduced. Adding an edge that
  // is already present is a no-op.
  void add_edge(ProvEdge edge);
  // Throws MissingSubject, InvalidArgument (confidence outside [0,1] or an
  // appraiser that is neither an Agent nor the analyst marker).
  void add_appraisal(Appraisal appraisal);

  const std::vector<ProvNode>& nodes() const { return nodes_; }
  const std::vector<ProvEdge>& edges() const { return edges_; }
  const std::vector<Appraisal>& appraisals() const { return appraisals_; }
  std::size_t node_count() const { return nodes_.size(); }

  bool contains(std::string_view id) const;
  bool contains_edge(const ProvEdge& edge) const;
  std::optional<NodeIndex> index_of(std::string_view id) const;
  const ProvNode* find(std::string_view id) const;
  // Throws UnknownNode.
  const ProvNode& node(std::string_view id) const;
  const ProvNode& node(NodeIndex index) const { return nodes_[index]; }

  // Last appraisal carrying a confidence wins.
  std::optional<double> appraised_confidence(std::string_view id) const;
  std::vector<const Appraisal*> appraisals_of(std::string_view id) const;

  bool operator==(const ProvGraph& other) const;

 private:
  bool reaches(NodeIndex start, NodeIndex target) const;

  std::vector<ProvNode> nodes_;
  std::vector<ProvEdge> edges_;
  std::vector<Appraisal> appraisals_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::set<ProvEdge> edge_set_;
  // Ordering-relation adjacency (from -> to) used for incremental cycle checks.
  std::vector<std::vector<NodeIndex>> ordering_out_;
};

// Empty iff every graph invariant holds.
std::vector<Violation> validate(const ProvGraph& graph);

// Nodes with no support of their own: Agents, Entities with no generating
// activity and no derivation parents, Activities that use nothing and have no
// associated agent.
std::set<NodeId> roots(const ProvGraph& graph);
// Nodes that nothing depends on.
std::set<NodeId> sinks(const ProvGraph& graph);

}  // namespace provex
