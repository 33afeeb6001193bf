#pragma once

#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "provex/graph.hpp"
#include "provex/support.hpp"

namespace provex {

enum class Status { In, Out, Refuted };
std::string_view to_string(Status status);

// What-if state layered over an immutable graph.
struct Overlay {
  std::set<NodeId> refuted;
  std::map<NodeId, double> confidence_overrides;

  bool operator==(const Overlay&) const = default;
};

// Throws UnknownNode for ids missing from the graph and InvalidArgument for
// overrides outside [0,1].
void check_overlay(const ProvGraph& graph, const Overlay& overlay);

// Index-aligned with graph.nodes().
using StatusVector = std::vector<Status>;
using ConfidenceVector = std::vector<std::optional<double>>;

// Least fixpoint: a node is IN when it is not refuted and is a root or has an
// alternative whose members are all IN. One pass in support order suffices.
StatusVector support_fixpoint(const ProvGraph& graph, const SupportModel& model, const Overlay& overlay);

// Defined on IN nodes only. Roots take their override, else their last
// appraised confidence, else 1.0. Other nodes take the best alternative, an
// alternative being worth its weakest member, and are then capped by their
// own override or appraisal.
ConfidenceVector propagate_confidence(const ProvGraph& graph, const SupportModel& model, const Overlay& overlay,
                                      const StatusVector& status);

// Nodes that lose support, or whose confidence strictly drops, when `focus`
// is refuted on top of `overlay`. Focus nodes themselves are excluded.
std::set<NodeId> impact(const ProvGraph& graph, const SupportModel& model, const Overlay& overlay,
                        const std::set<NodeId>& focus);

// Focus nodes plus everything reachable upstream through alternatives whose
// members are all IN.
std::set<NodeId> pertinence(const ProvGraph& graph, const SupportModel& model, const StatusVector& status,
                            const std::set<NodeId>& focus);

// Map-returning conveniences.
std::map<NodeId, Status> support_fixpoint(const ProvGraph& graph, const Overlay& overlay);
std::map<NodeId, double> propagate_confidence(const ProvGraph& graph, const Overlay& overlay);

}  // namespace provex
