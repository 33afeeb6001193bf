#include "provex/graph.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <utility>

#include "provex/error.hpp"

namespace provex {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::CycleIntroduced: return "CycleIntroduced";
    case ErrorCode::MissingEndpoint: return "MissingEndpoint";
    case ErrorCode::MissingSubject: return "MissingSubject";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Unsolvable: return "Unsolvable";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::UnreplayablePlan: return "UnreplayablePlan";
    case ErrorCode::UnknownSource: return "UnknownSource";
    case ErrorCode::CyclicSupport: return "CyclicSupport";
    case ErrorCode::OverflowUnsound: return "OverflowUnsound";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::NotAnActivity: return "NotAnActivity";
    case ErrorCode::NotAGoal: return "NotAGoal";
  }
  return "Unknown";
}

namespace {

constexpr std::array<std::pair<NodeKind, std::string_view>, 3> kKindNames{{
    {NodeKind::Entity, "Entity"},
    {NodeKind::Activity, "Activity"},
    {NodeKind::Agent, "Agent"},
}};

constexpr std::array<std::pair<NodeSubtype, std::string_view>, 5> kSubtypeNames{{
    {NodeSubtype::Belief, "Belief"},
    {NodeSubtype::InformationSource, "InformationSource"},
    {NodeSubtype::Goal, "Goal"},
    {NodeSubtype::Task, "Task"},
    {NodeSubtype::Actor, "Actor"},
}};

constexpr std::array<std::pair<Relation, std::string_view>, 7> kRelationNames{{
    {Relation::Used, "Used"},
    {Relation::WasGeneratedBy, "WasGeneratedBy"},
    {Relation::WasAssociatedWith, "WasAssociatedWith"},
    {Relation::WasDerivedFrom, "WasDerivedFrom"},
    {Relation::WasInformedBy, "WasInformedBy"},
    {Relation::ActedOnBehalfOf, "ActedOnBehalfOf"},
    {Relation::WasAttributedTo, "WasAttributedTo"},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table, Enum value) {
  for (const auto& [candidate, name] : table)
    if (candidate == value) return name;
  return "?";
}

template <typename Enum, std::size_t N>
std::optional<Enum> parse_name(const std::array<std::pair<Enum, std::string_view>, N>& table,
                               std::string_view text) {
  for (const auto& [candidate, name] : table)
    if (name == text) return candidate;
  return std::nullopt;
}

std::string describe(const ProvEdge& edge) {
  std::ostringstream out;
  out << edge.from << " -[" << to_string(edge.relation) << "]-> " << edge.to;
  return out.str();
}

}  // namespace

std::string_view to_string(NodeKind kind) { return name_of(kKindNames, kind); }
std::string_view to_string(NodeSubtype subtype) { return name_of(kSubtypeNames, subtype); }
std::string_view to_string(Relation relation) { return name_of(kRelationNames, relation); }

std::optional<NodeKind> parse_node_kind(std::string_view text) { return parse_name(kKindNames, text); }
std::optional<NodeSubtype> parse_node_subtype(std::string_view text) {
  return parse_name(kSubtypeNames, text);
}
std::optional<Relation> parse_relation(std::string_view text) {
  return parse_name(kRelationNames, text);
}

NodeKind kind_of(NodeSubtype subtype) {
  switch (subtype) {
    case NodeSubtype::Belief:
    case NodeSubtype::InformationSource:
    case NodeSubtype::Goal:
      return NodeKind::Entity;
    case NodeSubtype::Task:
      return NodeKind::Activity;
    case NodeSubtype::Actor:
      return NodeKind::Agent;
  }
  return NodeKind::Entity;
}

RelationSignature signature(Relation relation) {
  switch (relation) {
    case Relation::Used: return {NodeKind::Activity, NodeKind::Entity};
    case Relation::WasGeneratedBy: return {NodeKind::Entity, NodeKind::Activity};
    case Relation::WasAssociatedWith: return {NodeKind::Activity, NodeKind::Agent};
    case Relation::WasDerivedFrom: return {NodeKind::Entity, NodeKind::Entity};
    case Relation::WasInformedBy: return {NodeKind::Activity, NodeKind::Activity};
    case Relation::ActedOnBehalfOf: return {NodeKind::Agent, NodeKind::Agent};
    case Relation::WasAttributedTo: return {NodeKind::Entity, NodeKind::Agent};
  }
  return {NodeKind::Entity, NodeKind::Entity};
}

bool is_support_relation(Relation relation) {
  return relation == Relation::Used || relation == Relation::WasGeneratedBy ||
         relation == Relation::WasAssociatedWith || relation == Relation::WasDerivedFrom;
}

bool is_ordering_relation(Relation relation) {
  return relation == Relation::Used || relation == Relation::WasGeneratedBy ||
         relation == Relation::WasDerivedFrom || relation == Relation::WasInformedBy;
}

ProvGraph ProvGraph::from_parts(std::vector<ProvNode> nodes, std::vector<ProvEdge> edges,
                                std::vector<Appraisal> appraisals) {
  ProvGraph graph;
  graph.nodes_ = std::move(nodes);
  graph.edges_ = std::move(edges);
  graph.appraisals_ = std::move(appraisals);
  graph.ordering_out_.resize(graph.nodes_.size());
  for (auto& node : graph.nodes_)
    if (node.attributes.is_null()) node.attributes = nlohmann::json::object();
  for (std::size_t i = 0; i < graph.nodes_.size(); ++i)
    graph.index_.emplace(graph.nodes_[i].id, static_cast<NodeIndex>(i));
  for (const auto& edge : graph.edges_) {
    graph.edge_set_.insert(edge);
    if (!is_ordering_relation(edge.relation)) continue;
    auto from = graph.index_of(edge.from);
    auto to = graph.index_of(edge.to);
    if (from && to) graph.ordering_out_[*from].push_back(*to);
  }
  return graph;
}

void ProvGraph::add_node(ProvNode node) {
  if (index_.contains(node.id))
    throw Error(ErrorCode::DuplicateId, "node id already present: " + node.id);
  if (kind_of(node.subtype) != node.kind)
    throw Error(ErrorCode::KindMismatch, "subtype " + std::string(to_string(node.subtype)) +
                                             " is not a " + std::string(to_string(node.kind)));
  if (node.attributes.is_null()) node.attributes = nlohmann::json::object();
  index_.emplace(node.id, static_cast<NodeIndex>(nodes_.size()));
  nodes_.push_back(std::move(node));
  ordering_out_.emplace_back();
}

void ProvGraph::add_edge(ProvEdge edge) {
  auto from = index_of(edge.from);
  auto to = index_of(edge.to);
  if (!from || !to)
    throw Error(ErrorCode::MissingEndpoint, "edge endpoint missing: " + describe(edge));
  const auto sig = signature(edge.relation);
  if (nodes_[*from].kind != sig.from || nodes_[*to].kind != sig.to)
    throw Error(ErrorCode::KindMismatch,
                describe(edge) + " requires " + std::string(to_string(sig.from)) + " -> " +
                    std::string(to_string(sig.to)));
  if (edge_set_.contains(edge)) return;
  if (is_ordering_relation(edge.relation)) {
    if (*from == *to || reaches(*to, *from))
      throw Error(ErrorCode::CycleIntroduced, "edge closes a support cycle: " + describe(edge));
    ordering_out_[*from].push_back(*to);
  }
  edge_set_.insert(edge);
  edges_.push_back(std::move(edge));
}

void ProvGraph::add_appraisal(Appraisal appraisal) {
  if (!contains(appraisal.subject))
    throw Error(ErrorCode::MissingSubject, "appraisal subject not in graph: " + appraisal.subject);
  if (appraisal.confidence && (*appraisal.confidence < 0.0 || *appraisal.confidence > 1.0))
    throw Error(ErrorCode::InvalidArgument, "confidence outside [0,1] for " + appraisal.subject);
  if (appraisal.appraiser != kAnalystAppraiser) {
    const auto* appraiser = find(appraisal.appraiser);
    if (appraiser == nullptr || appraiser->kind != NodeKind::Agent)
      throw Error(ErrorCode::InvalidArgument,
                  "appraiser must be an Agent or \"analyst\": " + appraisal.appraiser);
  }
  appraisals_.push_back(std::move(appraisal));
}

bool ProvGraph::contains(std::string_view id) const { return index_of(id).has_value(); }

bool ProvGraph::contains_edge(const ProvEdge& edge) const { return edge_set_.contains(edge); }

std::optional<NodeIndex> ProvGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const ProvNode* ProvGraph::find(std::string_view id) const {
  auto index = index_of(id);
  return index ? &nodes_[*index] : nullptr;
}

const ProvNode& ProvGraph::node(std::string_view id) const {
  const auto* found = find(id);
  if (found == nullptr) throw Error(ErrorCode::UnknownNode, "unknown node: " + std::string(id));
  return *found;
}

std::optional<double> ProvGraph::appraised_confidence(std::string_view id) const {
  for (auto it = appraisals_.rbegin(); it != appraisals_.rend(); ++it)
    if (it->subject == id && it->confidence) return it->confidence;
  return std::nullopt;
}

std::vector<const Appraisal*> ProvGraph::appraisals_of(std::string_view id) const {
  std::vector<const Appraisal*> out;
  for (const auto& appraisal : appraisals_)
    if (appraisal.subject == id) out.push_back(&appraisal);
  return out;
}

bool ProvGraph::operator==(const ProvGraph& other) const {
  return nodes_ == other.nodes_ && edges_ == other.edges_ && appraisals_ == other.appraisals_;
}

bool ProvGraph::reaches(NodeIndex start, NodeIndex target) const {
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<NodeIndex> stack{start};
  seen[start] = 1;
  while (!stack.empty()) {
    NodeIndex current = stack.back();
    stack.pop_back();
    if (current == target) return true;
    for (NodeIndex next : ordering_out_[current]) {
      if (seen[next]) continue;
      seen[next] = 1;
      stack.push_back(next);
    }
  }
  return false;
}

std::vector<Violation> validate(const ProvGraph& graph) {
  std::vector<Violation> violations;
  const auto& nodes = graph.nodes();

  std::unordered_map<std::string, NodeIndex> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    if (!index.emplace(node.id, static_cast<NodeIndex>(i)).second)
      violations.push_back({"DuplicateId", node.id, "node id appears more than once"});
    if (kind_of(node.subtype) != node.kind)
      violations.push_back({"KindMismatch", node.id,
                            "subtype " + std::string(to_string(node.subtype)) + " on a " +
                                std::string(to_string(node.kind))});
  }

  std::vector<std::vector<NodeIndex>> ordering(nodes.size());
  std::vector<char> has_dependent(nodes.size(), 0);
  for (const auto& edge : graph.edges()) {
    auto from = index.find(edge.from);
    auto to = index.find(edge.to);
    if (from == index.end() || to == index.end()) {
      violations.push_back({"MissingEndpoint", describe(edge),
                            "endpoint " + (from == index.end() ? edge.from : edge.to) +
                                " does not exist"});
      continue;
    }
    const auto sig = signature(edge.relation);
    if (nodes[from->second].kind != sig.from || nodes[to->second].kind != sig.to) {
      violations.push_back({"KindMismatch", describe(edge),
                            std::string(to_string(edge.relation)) + " requires " +
                                std::string(to_string(sig.from)) + " -> " +
                                std::string(to_string(sig.to))});
      continue;
    }
    if (is_ordering_relation(edge.relation)) ordering[from->second].push_back(to->second);
    if (is_support_relation(edge.relation)) has_dependent[to->second] = 1;
  }

  // Kahn's algorithm; whatever is left over sits on or behind a cycle.
  std::vector<std::size_t> indegree(nodes.size(), 0);
  for (const auto& targets : ordering)
    for (NodeIndex t : targets) ++indegree[t];
  std::vector<NodeIndex> ready;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (indegree[i] == 0) ready.push_back(static_cast<NodeIndex>(i));
  std::size_t visited = 0;
  while (!ready.empty()) {
    NodeIndex current = ready.back();
    ready.pop_back();
    ++visited;
    for (NodeIndex t : ordering[current])
      if (--indegree[t] == 0) ready.push_back(t);
  }
  if (visited != nodes.size()) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (indegree[i] != 0)
        violations.push_back({"CycleIntroduced", nodes[i].id, "node lies on a support cycle"});
  }

  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].subtype == NodeSubtype::Goal && has_dependent[i])
      violations.push_back({"GoalNotSink", nodes[i].id, "goal entity has dependents"});

  for (const auto& appraisal : graph.appraisals()) {
    if (!index.contains(appraisal.subject))
      violations.push_back({"MissingSubject", appraisal.subject, "appraisal subject does not exist"});
    if (appraisal.confidence && (*appraisal.confidence < 0.0 || *appraisal.confidence > 1.0))
      violations.push_back({"ConfidenceRange", appraisal.subject, "confidence outside [0,1]"});
    if (appraisal.appraiser != kAnalystAppraiser) {
      auto it = index.find(appraisal.appraiser);
      if (it == index.end() || nodes[it->second].kind != NodeKind::Agent)
        violations.push_back({"UnknownAppraiser", appraisal.appraiser,
                              "appraiser is neither an Agent nor the analyst"});
    }
  }
  return violations;
}

std::set<NodeId> roots(const ProvGraph& graph) {
  std::vector<char> supported(graph.node_count(), 0);
  for (const auto& edge : graph.edges()) {
    if (!is_support_relation(edge.relation)) continue;
    auto from = graph.index_of(edge.from);
    if (from && graph.node(*from).kind != NodeKind::Agent) supported[*from] = 1;
  }
  std::set<NodeId> out;
  for (std::size_t i = 0; i < graph.node_count(); ++i)
    if (!supported[i]) out.insert(graph.nodes()[i].id);
  return out;
}

std::set<NodeId> sinks(const ProvGraph& graph) {
  std::vector<char> depended_on(graph.node_count(), 0);
  for (const auto& edge : graph.edges()) {
    if (!is_support_relation(edge.relation)) continue;
    if (auto to = graph.index_of(edge.to)) depended_on[*to] = 1;
  }
  std::set<NodeId> out;
  for (std::size_t i = 0; i < graph.node_count(); ++i)
    if (!depended_on[i]) out.insert(graph.nodes()[i].id);
  return out;
}

}  // namespace provex
