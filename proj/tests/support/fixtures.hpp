#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <random>
#include <string>
#include <vector>

#include "provex/graph.hpp"
#include "provex/htn/domain.hpp"

namespace provex::testing {

std::filesystem::path data_dir();

htn::Domain rover_domain();
htn::Problem rover_problem();
std::vector<Appraisal> rover_appraisals();
htn::Domain logistics_domain();

// Ids used by the rover scenario.
namespace rover {
inline const NodeId kGoal = "have_image(objective1,high_res)";
inline const NodeId kVisible = "visible(objective1,waypoint0)";
inline const NodeId kNavFlier = "navigate(flier1,base,waypoint0)";
inline const NodeId kNavRover = "navigate(rover0,base,waypoint0)";
inline const NodeId kImageFlier = "take_image(flier1,objective1,waypoint0,high_res)";
inline const NodeId kImageRover = "take_image(rover0,objective1,waypoint0,high_res)";
inline const NodeId kCommFlier = "communicate(flier1,objective1,high_res)";
inline const NodeId kCommRover = "communicate(rover0,objective1,high_res)";
inline const NodeId kAtFlierBase = "at(flier1,base)";
inline const NodeId kAtRoverBase = "at(rover0,base)";
inline const NodeId kAtFlierWp = "at(flier1,waypoint0)";
inline const NodeId kAtRoverWp = "at(rover0,waypoint0)";
inline const NodeId kClearFlier = "path_clear(flier1,base,waypoint0)";
inline const NodeId kClearRover = "path_clear(rover0,base,waypoint0)";
inline const NodeId kCapturedFlier = "image_captured(flier1,objective1,high_res)";
inline const NodeId kCapturedRover = "image_captured(rover0,objective1,high_res)";
}  // namespace rover

// The merged two-plan rover provenance graph assembled with add_node/add_edge,
// without the planner or the mapping. Includes the 0.20 / 0.80 appraisals.
ProvGraph rover_graph_by_hand();

// Rover graph produced by the planner + mapping pipeline.
ProvGraph rover_graph_from_planner(bool with_appraisals = true);

// Random logistics problem over `logistics_domain()`: a hub location joined to
// every other location, extra random roads, 1-2 trucks and 1-3 packages.
htn::Problem random_logistics_problem(std::mt19937_64& rng);

struct RandomDagOptions {
  std::size_t max_roots = 12;
  std::size_t max_nodes = 60;
};

// Random valid provenance graph: roots are sources, agents and unsourced
// beliefs; interior nodes are activities and derived/generated beliefs.
ProvGraph random_support_dag(std::mt19937_64& rng, RandomDagOptions options = {});

// Tree-shaped graph (every node feeds exactly one dependent, every support
// alternative has exactly one member) with appraised roots and some appraised
// interior nodes. The sink is returned through `sink`.
ProvGraph random_confidence_tree(std::mt19937_64& rng, NodeId& sink);

// Independent oracle for environments: evaluates derivability of every node
// for all 2^|roots| root subsets straight from the edge list, then keeps the
// minimal deriving subsets. Meant for graphs with at most ~14 roots.
std::map<NodeId, std::set<std::set<NodeId>>> brute_force_environments(const ProvGraph& graph);

// Max over root-to-sink support paths of the min appraised confidence along
// the path (unappraised nodes count as 1). Valid for tree-shaped graphs whose
// alternatives have one member each.
double closed_form_confidence(const ProvGraph& graph, const NodeId& sink);

// Derivability of every node with `refuted` removed, by naive iteration over
// the raw edges in a shuffled order until nothing changes.
std::map<NodeId, bool> chaotic_fixpoint(const ProvGraph& graph, const std::set<NodeId>& refuted, std::mt19937_64& rng);

// Layered synthetic graph for performance checks.
ProvGraph synthetic_graph(std::size_t nodes, std::size_t edges, std::uint64_t seed);

}  // namespace provex::testing
