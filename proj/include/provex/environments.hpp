#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "provex/graph.hpp"
#include "provex/support.hpp"

namespace provex {

// A set of root assumptions that together suffice to derive a node.
using Environment = std::set<NodeId>;

// Minimal environments of one node, smallest first (by size, then by sorted
// id sequence). When `overflow` is set the list was cut at the cap: every kept
// environment is still sufficient but some minimal ones are missing.
struct Label {
  std::vector<Environment> environments;
  bool overflow = false;

  bool operator==(const Label&) const = default;
};

inline constexpr std::size_t kDefaultLabelCap = 256;

// Labels for every node of a graph, stored as bitsets over the roots.
class Labels {
 public:
  using Bits = std::vector<std::uint64_t>;

  bool contains(const NodeId& id) const { return index_.contains(id); }
  // Throws UnknownNode.
  Label label(const NodeId& id) const;
  bool overflow(const NodeId& id) const;
  bool any_overflow() const;
  const std::vector<NodeId>& assumptions() const { return roots_; }
  // Number of node evaluations made while computing; equals the node count.
  std::size_t evaluations() const { return evaluations_; }

  // Bit view used by the query helpers.
  const std::vector<Bits>& raw(const NodeId& id) const;
  Bits mask(const std::set<NodeId>& ids) const;
  Environment decode(const Bits& bits) const;

 private:
  friend Labels compute_labels(const ProvGraph&, const SupportModel&, std::size_t);

  std::unordered_map<NodeId, NodeIndex> index_;
  std::vector<NodeId> roots_;
  std::unordered_map<NodeId, std::size_t> root_bit_;
  std::vector<std::vector<Bits>> envs_;
  std::vector<char> overflow_;
  std::size_t evaluations_ = 0;
};

// Single memoized backward traversal from the sinks. Throws CyclicSupport,
// InvalidArgument when cap is 0.
Labels compute_labels(const ProvGraph& graph, std::size_t cap = kDefaultLabelCap);
Labels compute_labels(const ProvGraph& graph, const SupportModel& model, std::size_t cap = kDefaultLabelCap);

// E(m)/N: the environments disjoint from N.
Label contract(const Label& label, const std::set<NodeId>& refuted);

// True when no environment of m survives the removal of N. Throws UnknownNode,
// and OverflowUnsound when the label is truncated and nothing survives, since
// a dropped environment might have.
bool is_necessary(const Labels& labels, const NodeId& m, const std::set<NodeId>& refuted);

// Intersection / list of m's environments. Throw UnknownNode, OverflowUnsound.
std::set<NodeId> necessary_assumptions(const Labels& labels, const NodeId& m);
std::vector<Environment> sufficient_sets(const Labels& labels, const NodeId& m);

// Appraisal assumption strings of the given nodes, skipping nodes without any.
std::map<NodeId, std::vector<std::string>> assumption_strings(const ProvGraph& graph, const std::set<NodeId>& nodes);

// {"node": {"environments": [[ids...], ...], "overflow": bool}, ...}
nlohmann::json labels_to_json(const ProvGraph& graph, const Labels& labels);
nlohmann::json to_json(const Label& label);

}  // namespace provex
