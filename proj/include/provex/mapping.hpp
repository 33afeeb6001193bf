#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "provex/graph.hpp"
#include "provex/htn/planner.hpp"

namespace provex {

struct MappingReport {
  std::map<std::string, std::size_t> nodes_by_subtype;
  std::map<std::string, std::size_t> edges_by_relation;
  std::vector<std::string> unsourced_facts;
  // Goal entities reached by more than one generating activity.
  std::vector<NodeId> merged_goals;
  std::vector<std::string> unachieved_goals;
  // Display-only WasInformedBy edges dropped because they would close a cycle
  // between activities shared by several plans.
  std::vector<std::string> skipped_ordering_edges;
};

struct MappingResult {
  ProvGraph graph;
  MappingReport report;
};

// Checks a plan against the problem using only what the plan records: every
// positive precondition's establisher must hold at that point of the
// simulation. Throws UnreplayablePlan or UnknownSource.
void verify_plan(const htn::Problem& problem, const htn::PlanTree& plan);

// Merges the plans into one provenance graph. Beliefs are shared when the same
// literal is established the same way; a goal literal achieved by several
// plans becomes a single Goal entity with one WasGeneratedBy edge per
// achieving activity. Throws UnreplayablePlan, UnknownSource, MissingSubject.
MappingResult plan_to_prov(std::span<const htn::PlanTree> plans, const htn::Problem& problem,
                           std::span<const Appraisal> appraisals = {});

// Appends an appraisal; later confidences on the same subject shadow earlier
// ones. Throws MissingSubject.
void attach_appraisal(ProvGraph& graph, Appraisal appraisal);

nlohmann::json to_json(const MappingReport& report);

}  // namespace provex
