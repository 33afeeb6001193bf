#include "fixtures.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "provex/graph_json.hpp"
#include "provex/htn/planner.hpp"
#include "provex/mapping.hpp"

namespace provex::testing {

namespace {

template <class T>
T pick(std::mt19937_64& rng, const std::vector<T>& items) {
  return items[std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng)];
}

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

double confidence(std::mt19937_64& rng) {
  // Coarse grid so that ties between alternatives are common.
  return static_cast<double>(uniform(rng, 0, 20)) / 20.0;
}

}  // namespace

std::filesystem::path data_dir() { return PROVEX_DATA_DIR; }

htn::Domain rover_domain() { return htn::load_domain(read_json_file(data_dir() / "rover" / "domain.json")); }
htn::Problem rover_problem() { return htn::load_problem(read_json_file(data_dir() / "rover" / "problem.json")); }
std::vector<Appraisal> rover_appraisals() {
  return appraisals_from_json(read_json_file(data_dir() / "rover" / "appraisals.json"));
}
htn::Domain logistics_domain() {
  return htn::load_domain(read_json_file(data_dir() / "logistics" / "domain.json"));
}

ProvGraph rover_graph_by_hand() {
  using namespace rover;
  ProvGraph g;
  auto entity = [&](const NodeId& id, NodeSubtype subtype) {
    g.add_node(ProvNode{id, NodeKind::Entity, subtype, id, nlohmann::json::object()});
  };
  g.add_node(ProvNode{"TerrainMap", NodeKind::Entity, NodeSubtype::InformationSource, "Terrain Map", {}});
  g.add_node(ProvNode{"ElevationMap", NodeKind::Entity, NodeSubtype::InformationSource, "Elevation Map", {}});
  g.add_node(ProvNode{"flier1", NodeKind::Agent, NodeSubtype::Actor, "flier1", {}});
  g.add_node(ProvNode{"rover0", NodeKind::Agent, NodeSubtype::Actor, "rover0", {}});
  for (const auto& id : {kAtFlierBase, kAtRoverBase, kClearFlier, kClearRover, kVisible})
    entity(id, NodeSubtype::Belief);
  for (const auto& id : {kNavFlier, kImageFlier, kCommFlier, kNavRover, kImageRover, kCommRover})
    g.add_node(ProvNode{id, NodeKind::Activity, NodeSubtype::Task, id, {}});
  for (const auto& id : {kAtFlierWp, kCapturedFlier, kAtRoverWp, kCapturedRover}) entity(id, NodeSubtype::Belief);
  entity(kGoal, NodeSubtype::Goal);

  auto edge = [&](const NodeId& from, const NodeId& to, Relation r) { g.add_edge(ProvEdge{from, to, r}); };
  edge(kClearFlier, "ElevationMap", Relation::WasDerivedFrom);
  edge(kClearRover, "TerrainMap", Relation::WasDerivedFrom);
  edge(kVisible, "ElevationMap", Relation::WasDerivedFrom);

  struct Unit {
    NodeId agent, at_base, clear, nav, at_wp, image, captured, comm;
  };
  for (const Unit& u : {Unit{"flier1", kAtFlierBase, kClearFlier, kNavFlier, kAtFlierWp, kImageFlier, kCapturedFlier,
                             kCommFlier},
                        Unit{"rover0", kAtRoverBase, kClearRover, kNavRover, kAtRoverWp, kImageRover, kCapturedRover,
                             kCommRover}}) {
    edge(u.nav, u.at_base, Relation::Used);
    edge(u.nav, u.clear, Relation::Used);
    edge(u.nav, u.agent, Relation::WasAssociatedWith);
    edge(u.at_wp, u.nav, Relation::WasGeneratedBy);
    edge(u.image, u.at_wp, Relation::Used);
    edge(u.image, kVisible, Relation::Used);
    edge(u.image, u.agent, Relation::WasAssociatedWith);
    edge(u.image, u.nav, Relation::WasInformedBy);
    edge(u.captured, u.image, Relation::WasGeneratedBy);
    edge(u.comm, u.captured, Relation::Used);
    edge(u.comm, u.agent, Relation::WasAssociatedWith);
    edge(u.comm, u.image, Relation::WasInformedBy);
    edge(kGoal, u.comm, Relation::WasGeneratedBy);
  }
  for (auto appraisal : rover_appraisals()) g.add_appraisal(std::move(appraisal));
  return g;
}

ProvGraph rover_graph_from_planner(bool with_appraisals) {
  const auto domain = rover_domain();
  const auto problem = rover_problem();
  const auto plans = htn::all_plans(domain, problem, 8);
  const auto appraisals = with_appraisals ? rover_appraisals() : std::vector<Appraisal>{};
  return plan_to_prov(plans, problem, appraisals).graph;
}

htn::Problem random_logistics_problem(std::mt19937_64& rng) {
  htn::Problem p;
  p.sources = {{"Telemetry", "Telemetry", {"SIGINT"}},
               {"Atlas", "Atlas", {"GEOINT"}},
               {"Manifest", "Manifest", {"OSINT", "HUMINT"}}};
  const std::vector<std::optional<std::string>> annotations = {std::nullopt, "Telemetry", "Atlas", "Manifest"};
  auto fact = [&](const std::string& text) {
    p.state.push_back({htn::parse_literal(text), pick(rng, annotations)});
  };

  const std::size_t spokes = uniform(rng, 2, 4);
  std::vector<std::string> locations = {"hub"};
  for (std::size_t i = 0; i < spokes; ++i) locations.push_back("loc" + std::to_string(i));
  for (std::size_t i = 1; i < locations.size(); ++i)
    fact(chance(rng, 0.5) ? "road(hub," + locations[i] + ")" : "road(" + locations[i] + ",hub)");
  for (std::size_t i = 1; i < locations.size(); ++i)
    for (std::size_t j = i + 1; j < locations.size(); ++j)
      if (chance(rng, 0.3)) fact("road(" + locations[i] + "," + locations[j] + ")");

  const std::size_t trucks = uniform(rng, 1, 2);
  for (std::size_t t = 0; t < trucks; ++t) {
    const std::string truck = "truck" + std::to_string(t);
    p.agents.push_back({truck, truck});
    fact("truck(" + truck + ")");
    fact("at(" + truck + "," + pick(rng, locations) + ")");
  }
  const std::size_t packages = uniform(rng, 1, 3);
  for (std::size_t k = 0; k < packages; ++k) {
    const std::string package = "pkg" + std::to_string(k);
    fact("at(" + package + "," + pick(rng, locations) + ")");
    const auto task = htn::parse_literal("deliver(" + package + "," + pick(rng, locations) + ")");
    p.tasks.push_back(task);
    p.goals.push_back(htn::parse_literal("at(" + package + "," + task.args[1].text + ")"));
  }
  std::shuffle(p.state.begin(), p.state.end(), rng);
  return p;
}

ProvGraph random_support_dag(std::mt19937_64& rng, RandomDagOptions options) {
  ProvGraph g;
  std::vector<NodeId> entities, activities, agents;
  const std::size_t root_count = uniform(rng, 1, options.max_roots);
  for (std::size_t i = 0; i < root_count; ++i) {
    const std::size_t which = i == 0 ? 0 : uniform(rng, 0, 2);
    const NodeId id = "r" + std::to_string(i);
    if (which == 0) {
      g.add_node(ProvNode{id, NodeKind::Entity, NodeSubtype::InformationSource, id, {}});
      entities.push_back(id);
    } else if (which == 1) {
      g.add_node(ProvNode{id, NodeKind::Agent, NodeSubtype::Actor, id, {}});
      agents.push_back(id);
    } else {
      g.add_node(ProvNode{id, NodeKind::Entity, NodeSubtype::Belief, id, {}});
      entities.push_back(id);
    }
    if (chance(rng, 0.7)) g.add_appraisal(Appraisal{.subject = id, .confidence = confidence(rng)});
  }

  const std::size_t interior = uniform(rng, 1, options.max_nodes > root_count ? options.max_nodes - root_count : 1);
  for (std::size_t i = 0; i < interior; ++i) {
    const NodeId id = "n" + std::to_string(i);
    const bool activity = !entities.empty() && (activities.empty() || chance(rng, 0.5));
    if (activity) {
      g.add_node(ProvNode{id, NodeKind::Activity, NodeSubtype::Task, id, {}});
      const std::size_t uses = uniform(rng, agents.empty() ? 1 : 0, 3);
      for (std::size_t k = 0; k < uses; ++k) g.add_edge(ProvEdge{id, pick(rng, entities), Relation::Used});
      if (!agents.empty() && (uses == 0 || chance(rng, 0.3)))
        g.add_edge(ProvEdge{id, pick(rng, agents), Relation::WasAssociatedWith});
      if (!activities.empty() && chance(rng, 0.2))
        g.add_edge(ProvEdge{id, pick(rng, activities), Relation::WasInformedBy});
      activities.push_back(id);
    } else {
      g.add_node(ProvNode{id, NodeKind::Entity, NodeSubtype::Belief, id, {}});
      const bool generated = !activities.empty() && chance(rng, 0.7);
      if (generated) {
        const std::size_t producers = uniform(rng, 1, 2);
        for (std::size_t k = 0; k < producers; ++k)
          g.add_edge(ProvEdge{id, pick(rng, activities), Relation::WasGeneratedBy});
      }
      if (!generated || chance(rng, 0.3)) {
        const std::size_t parents = uniform(rng, 1, 2);
        for (std::size_t k = 0; k < parents; ++k) g.add_edge(ProvEdge{id, pick(rng, entities), Relation::WasDerivedFrom});
      }
      entities.push_back(id);
    }
    if (chance(rng, 0.15)) g.add_appraisal(Appraisal{.subject = id, .confidence = confidence(rng)});
  }
  return g;
}

ProvGraph random_confidence_tree(std::mt19937_64& rng, NodeId& sink) {
  ProvGraph g;
  std::size_t counter = 0;
  // Returns the id of a fresh entity subtree.
  std::function<NodeId(std::size_t)> entity = [&](std::size_t depth) -> NodeId {
    const NodeId id = "e" + std::to_string(counter++);
    const bool leaf = depth == 0 || chance(rng, 0.25);
    g.add_node(ProvNode{id, NodeKind::Entity, leaf ? NodeSubtype::InformationSource : NodeSubtype::Belief, id, {}});
    if (leaf) {
      g.add_appraisal(Appraisal{.subject = id, .confidence = confidence(rng)});
      return id;
    }
    const std::size_t producers = uniform(rng, 0, 3);
    for (std::size_t k = 0; k < producers; ++k) {
      const NodeId act = "a" + std::to_string(counter++);
      g.add_node(ProvNode{act, NodeKind::Activity, NodeSubtype::Task, act, {}});
      g.add_edge(ProvEdge{act, entity(depth - 1), Relation::Used});
      g.add_edge(ProvEdge{id, act, Relation::WasGeneratedBy});
      if (chance(rng, 0.2)) g.add_appraisal(Appraisal{.subject = act, .confidence = confidence(rng)});
    }
    if (producers == 0 || chance(rng, 0.3))
      g.add_edge(ProvEdge{id, entity(depth - 1), Relation::WasDerivedFrom});
    if (chance(rng, 0.2)) g.add_appraisal(Appraisal{.subject = id, .confidence = confidence(rng)});
    return id;
  };
  sink = entity(uniform(rng, 1, 5));
  return g;
}

namespace {

// Support edges grouped per node, read directly off the edge list.
struct RawSupport {
  std::vector<std::vector<std::size_t>> conj;        // Used + WasAssociatedWith (activities)
  std::vector<std::vector<std::size_t>> generators;  // WasGeneratedBy (entities)
  std::vector<std::vector<std::size_t>> parents;     // WasDerivedFrom (entities)
  std::vector<bool> root;

  explicit RawSupport(const ProvGraph& g)
      : conj(g.node_count()), generators(g.node_count()), parents(g.node_count()), root(g.node_count(), false) {
    for (const auto& e : g.edges()) {
      const auto from = *g.index_of(e.from);
      const auto to = *g.index_of(e.to);
      if (e.relation == Relation::Used || e.relation == Relation::WasAssociatedWith) conj[from].push_back(to);
      if (e.relation == Relation::WasGeneratedBy) generators[from].push_back(to);
      if (e.relation == Relation::WasDerivedFrom) parents[from].push_back(to);
    }
    for (std::size_t i = 0; i < g.node_count(); ++i)
      root[i] = conj[i].empty() && generators[i].empty() && parents[i].empty();
  }
};

}  // namespace

std::map<NodeId, std::set<std::set<NodeId>>> brute_force_environments(const ProvGraph& graph) {
  const RawSupport raw(graph);
  const std::size_t n = graph.node_count();
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i)
    if (raw.root[i]) roots.push_back(i);
  const std::size_t subsets = std::size_t{1} << roots.size();

  // derivable[node][subset]
  std::vector<std::vector<char>> derivable(n, std::vector<char>(subsets, 0));
  for (std::size_t k = 0; k < roots.size(); ++k)
    for (std::size_t s = 0; s < subsets; ++s) derivable[roots[k]][s] = (s >> k) & 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (raw.root[i]) continue;
      for (std::size_t s = 0; s < subsets; ++s) {
        if (derivable[i][s]) continue;
        bool holds = false;
        if (!raw.conj[i].empty())
          holds = std::all_of(raw.conj[i].begin(), raw.conj[i].end(), [&](std::size_t m) { return derivable[m][s]; });
        for (std::size_t g : raw.generators[i]) holds = holds || derivable[g][s];
        if (!raw.parents[i].empty())
          holds = holds ||
                  std::all_of(raw.parents[i].begin(), raw.parents[i].end(), [&](std::size_t m) { return derivable[m][s]; });
        if (holds) derivable[i][s] = changed = true;
      }
    }
  }

  std::map<NodeId, std::set<std::set<NodeId>>> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto& envs = out[graph.node(static_cast<NodeIndex>(i)).id];
    for (std::size_t s = 0; s < subsets; ++s) {
      if (!derivable[i][s]) continue;
      bool minimal = true;
      for (std::size_t k = 0; k < roots.size() && minimal; ++k)
        if (((s >> k) & 1) && derivable[i][s & ~(std::size_t{1} << k)]) minimal = false;
      if (!minimal) continue;
      std::set<NodeId> env;
      for (std::size_t k = 0; k < roots.size(); ++k)
        if ((s >> k) & 1) env.insert(graph.node(static_cast<NodeIndex>(roots[k])).id);
      envs.insert(std::move(env));
    }
  }
  return out;
}

double closed_form_confidence(const ProvGraph& graph, const NodeId& sink) {
  const RawSupport raw(graph);
  double best = 0.0;
  std::function<void(std::size_t, double)> walk = [&](std::size_t node, double so_far) {
    const auto own = graph.appraised_confidence(graph.node(static_cast<NodeIndex>(node)).id);
    const double value = std::min(so_far, own.value_or(1.0));
    if (raw.root[node]) {
      best = std::max(best, value);
      return;
    }
    for (const auto* list : {&raw.conj[node], &raw.generators[node], &raw.parents[node]})
      for (std::size_t next : *list) walk(next, value);
  };
  walk(*graph.index_of(sink), 1.0);
  return best;
}

std::map<NodeId, bool> chaotic_fixpoint(const ProvGraph& graph, const std::set<NodeId>& refuted, std::mt19937_64& rng) {
  const RawSupport raw(graph);
  const std::size_t n = graph.node_count();
  std::vector<char> in(n, 0), blocked(n, 0);
  for (std::size_t i = 0; i < n; ++i) blocked[i] = refuted.contains(graph.node(static_cast<NodeIndex>(i)).id);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (bool changed = true; changed;) {
    changed = false;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      if (in[i] || blocked[i]) continue;
      bool holds = raw.root[i];
      if (!raw.conj[i].empty())
        holds = holds || std::all_of(raw.conj[i].begin(), raw.conj[i].end(), [&](std::size_t m) { return in[m] != 0; });
      for (std::size_t g : raw.generators[i]) holds = holds || in[g];
      if (!raw.parents[i].empty())
        holds = holds || std::all_of(raw.parents[i].begin(), raw.parents[i].end(), [&](std::size_t m) { return in[m] != 0; });
      if (holds) in[i] = changed = true;
    }
  }
  std::map<NodeId, bool> out;
  for (std::size_t i = 0; i < n; ++i) out[graph.node(static_cast<NodeIndex>(i)).id] = in[i] != 0;
  return out;
}

ProvGraph synthetic_graph(std::size_t nodes, std::size_t edges, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ProvNode> node_list;
  std::vector<ProvEdge> edge_list;
  std::vector<Appraisal> appraisals;
  std::vector<std::size_t> entities, activities, agents;
  node_list.reserve(nodes);

  const std::size_t sources = std::max<std::size_t>(1, nodes / 20);
  const std::size_t actors = std::max<std::size_t>(1, nodes / 50);
  const std::size_t interior = nodes > sources + actors ? nodes - sources - actors : 0;
  const double per_node = interior ? static_cast<double>(edges) / static_cast<double>(interior) : 0.0;
  const std::vector<std::string> disciplines = {"GEOINT", "SIGINT", "OSINT", "HUMINT"};

  auto name = [](char prefix, std::size_t i) { return std::string(1, prefix) + std::to_string(i); };
  for (std::size_t i = 0; i < sources; ++i) {
    entities.push_back(node_list.size());
    node_list.push_back({name('s', i), NodeKind::Entity, NodeSubtype::InformationSource, name('s', i),
                         {{"disciplines", {disciplines[i % disciplines.size()]}}}});
    appraisals.push_back(Appraisal{.subject = name('s', i), .confidence = confidence(rng)});
  }
  for (std::size_t i = 0; i < actors; ++i) {
    agents.push_back(node_list.size());
    node_list.push_back({name('u', i), NodeKind::Agent, NodeSubtype::Actor, name('u', i), {}});
  }

  // Targets are drawn from a recent window so that the graph stays deep.
  auto recent = [&](const std::vector<std::size_t>& pool) {
    const std::size_t window = std::min<std::size_t>(pool.size(), 400);
    return pool[pool.size() - 1 - uniform(rng, 0, window - 1)];
  };
  const std::vector<std::string> operators = {"navigate", "observe", "relay", "survey", "deliver"};
  const std::vector<std::string> predicates = {"at", "clear", "visible", "holds", "reported", "tracked"};
  for (std::size_t i = 0; i < interior; ++i) {
    const std::size_t self = node_list.size();
    // Cumulative quota, so shortfalls from duplicate draws roll forward.
    const auto quota = static_cast<std::size_t>(per_node * static_cast<double>(i + 1) + 0.5);
    const std::size_t out = std::max<std::size_t>(1, quota > edge_list.size() ? quota - edge_list.size() : 0);
    std::set<ProvEdge> mine;
    if (i % 2 == 0 || activities.empty()) {
      const NodeId id = name('t', i);
      node_list.push_back({id, NodeKind::Activity, NodeSubtype::Task, id, {{"operator", operators[i % operators.size()]}}});
      mine.insert({id, node_list[pick(rng, agents)].id, Relation::WasAssociatedWith});
      for (std::size_t tries = 0; mine.size() < out && tries < 4 * out; ++tries) mine.insert({id, node_list[recent(entities)].id, Relation::Used});
      activities.push_back(self);
    } else {
      const NodeId id = name('b', i);
      node_list.push_back({id, NodeKind::Entity, NodeSubtype::Belief, id, {{"predicate", predicates[i % predicates.size()]}}});
      mine.insert({id, node_list[recent(activities)].id, Relation::WasGeneratedBy});
      for (std::size_t tries = 0; mine.size() < out && tries < 4 * out; ++tries) {
        if (chance(rng, 0.5))
          mine.insert({id, node_list[recent(activities)].id, Relation::WasGeneratedBy});
        else
          mine.insert({id, node_list[recent(entities)].id, Relation::WasDerivedFrom});
      }
      entities.push_back(self);
    }
    edge_list.insert(edge_list.end(), mine.begin(), mine.end());
  }
  return ProvGraph::from_parts(std::move(node_list), std::move(edge_list), std::move(appraisals));
}

}  // namespace provex::testing
