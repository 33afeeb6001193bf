#include "provex/mapping.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "provex/error.hpp"

namespace provex {

namespace {

using htn::CausalLink;
using htn::Consumer;
using htn::Establisher;
using htn::Literal;
using htn::PlanTree;
using htn::Problem;

constexpr std::string_view kPlannerAgent = "planner";

struct Origin {
  std::optional<std::size_t> producer;
};

[[noreturn]] void unreplayable(std::size_t action, const std::string& why) {
  throw Error(ErrorCode::UnreplayablePlan, "action " + std::to_string(action) + ": " + why);
}

nlohmann::json literal_attributes(const Literal& literal) {
  nlohmann::json args = nlohmann::json::array();
  for (const auto& arg : literal.args) args.push_back(arg.text);
  return {{"predicate", literal.predicate}, {"args", args}};
}

// Checks that `e` is currently true in the simulated state.
void check_establisher(const Establisher& e, const Problem& problem,
                       const std::map<std::string, Origin>& state, std::size_t consumer) {
  const std::string text = e.literal.to_string();
  switch (e.kind) {
    case Establisher::Kind::InitialFact: {
      auto it = state.find(text);
      if (it == state.end() || it->second.producer) unreplayable(consumer, text + " is not an initial fact here");
      auto declared = std::find_if(problem.state.begin(), problem.state.end(),
                                   [&](const htn::InitialFact& f) { return f.literal == e.literal; });
      if (declared == problem.state.end() || declared->source != e.source)
        unreplayable(consumer, text + " does not match the problem's initial state annotation");
      return;
    }
    case Establisher::Kind::ActionEffect: {
      if (e.producer >= consumer) unreplayable(consumer, text + " is produced at or after its consumer");
      auto it = state.find(text);
      if (it == state.end() || it->second.producer != e.producer)
        unreplayable(consumer, text + " does not hold as an effect of action " + std::to_string(e.producer));
      return;
    }
    case Establisher::Kind::AxiomDerivation:
      if (e.antecedents.empty()) unreplayable(consumer, text + " has an axiom derivation with no antecedents");
      for (const auto& child : e.antecedents) {
        if (child.literal.negated) {
          if (state.contains(child.literal.positive().to_string()))
            unreplayable(consumer, child.literal.to_string() + " is violated");
          continue;
        }
        check_establisher(child, problem, state, consumer);
      }
      return;
  }
}

void check_sources(const Establisher& e, const Problem& problem) {
  if (e.kind == Establisher::Kind::InitialFact && e.source && !problem.find_source(*e.source))
    throw Error(ErrorCode::UnknownSource, "unknown information source " + *e.source);
  for (const auto& child : e.antecedents) check_sources(child, problem);
}

class Mapper {
 public:
  Mapper(const Problem& problem) : problem_(problem) {}

  void reserve_goals(std::span<const PlanTree> plans) {
    for (const auto& goal : problem_.goals) reserved_.insert(goal.to_string());
    for (const auto& plan : plans)
      for (const auto& goal : implicit_goals(plan)) reserved_.insert(goal.to_string());
  }

  void add_sources_and_agents() {
    for (const auto& source : problem_.sources) {
      ProvNode node{source.id, NodeKind::Entity, NodeSubtype::InformationSource, source.label,
                    {{"disciplines", source.disciplines}}};
      graph_.add_node(std::move(node));
      used_ids_.insert(source.id);
    }
    for (const auto& agent : problem_.agents) add_agent(agent.id, agent.label);
  }

  void add_initial_beliefs() {
    for (const auto& fact : problem_.state) {
      const std::string text = fact.literal.to_string();
      if (initial_beliefs_.contains(text)) continue;
      if (fact.source && !problem_.find_source(*fact.source))
        throw Error(ErrorCode::UnknownSource, "unknown information source " + *fact.source);
      auto attributes = literal_attributes(fact.literal);
      attributes["initial"] = true;
      if (fact.source) attributes["source"] = *fact.source;
      const NodeId id = allocate(text);
      graph_.add_node(ProvNode{id, NodeKind::Entity, NodeSubtype::Belief, text, std::move(attributes)});
      initial_beliefs_.emplace(text, id);
      if (fact.source)
        graph_.add_edge(ProvEdge{id, *fact.source, Relation::WasDerivedFrom});
      else
        report_.unsourced_facts.push_back(text);
    }
  }

  void map_plan(const PlanTree& plan) {
    activity_ids_.assign(plan.actions.size(), NodeId{});
    std::vector<std::vector<const CausalLink*>> links_by_action(plan.actions.size());
    for (const auto& link : plan.links)
      if (link.consumer.kind == Consumer::Kind::Action && link.consumer.index < plan.actions.size())
        links_by_action[link.consumer.index].push_back(&link);

    for (std::size_t i = 0; i < plan.actions.size(); ++i) {
      const auto& action = plan.actions[i];
      std::vector<NodeId> used;
      for (const auto* link : links_by_action[i]) {
        if (link->condition.negated) continue;
        used.push_back(belief_for(link->establisher));
      }
      const NodeId agent = action.agent ? ensure_agent(*action.agent) : ensure_agent(std::string(kPlannerAgent));

      std::vector<NodeId> sorted_used = used;
      std::sort(sorted_used.begin(), sorted_used.end());
      sorted_used.erase(std::unique(sorted_used.begin(), sorted_used.end()), sorted_used.end());
      std::string key = action.to_string() + "|" + agent;
      for (const auto& id : sorted_used) key += "|" + id;

      auto found = activity_keys_.find(key);
      if (found == activity_keys_.end()) {
        const std::string text = action.to_string();
        const NodeId id = allocate(text);
        nlohmann::json args = nlohmann::json::array();
        for (const auto& arg : action.args) args.push_back(arg);
        graph_.add_node(ProvNode{id, NodeKind::Activity, NodeSubtype::Task, text,
                                 {{"operator", action.op}, {"args", args}, {"agent", agent}, {"planned", true}}});
        for (const auto& belief : sorted_used) graph_.add_edge(ProvEdge{id, belief, Relation::Used});
        graph_.add_edge(ProvEdge{id, agent, Relation::WasAssociatedWith});
        found = activity_keys_.emplace(key, id).first;
      }
      activity_ids_[i] = found->second;

      if (i > 0) {
        ProvEdge ordering{activity_ids_[i], activity_ids_[i - 1], Relation::WasInformedBy};
        try {
          graph_.add_edge(ordering);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::CycleIntroduced) throw;
          report_.skipped_ordering_edges.push_back(ordering.from + " -> " + ordering.to);
        }
      }
    }
    map_goals(plan);
  }

  MappingResult finish() {
    for (const auto& [goal, producers] : goal_producers_)
      if (producers.size() > 1) report_.merged_goals.push_back(goal);
    for (const auto& node : graph_.nodes()) ++report_.nodes_by_subtype[std::string(to_string(node.subtype))];
    for (const auto& edge : graph_.edges()) ++report_.edges_by_relation[std::string(to_string(edge.relation))];
    return MappingResult{std::move(graph_), std::move(report_)};
  }

  ProvGraph& graph() { return graph_; }

 private:
  NodeId allocate(const std::string& base) {
    NodeId id = base;
    for (int n = 2; used_ids_.contains(id) || (reserved_.contains(id) && !reserving_goal_); ++n)
      id = base + "#" + std::to_string(n);
    used_ids_.insert(id);
    return id;
  }

  void add_agent(const std::string& id, const std::string& label) {
    if (agents_.contains(id)) return;
    if (used_ids_.contains(id)) throw Error(ErrorCode::DuplicateId, "agent id clashes with another node: " + id);
    graph_.add_node(ProvNode{id, NodeKind::Agent, NodeSubtype::Actor, label, nlohmann::json::object()});
    used_ids_.insert(id);
    agents_.insert(id);
  }

  NodeId ensure_agent(const std::string& id) {
    add_agent(id, id);
    return id;
  }

  NodeId belief_for(const Establisher& e) {
    const std::string text = e.literal.to_string();
    switch (e.kind) {
      case Establisher::Kind::InitialFact: {
        auto it = initial_beliefs_.find(text);
        if (it == initial_beliefs_.end()) throw Error(ErrorCode::UnreplayablePlan, text + " is not in the initial state");
        return it->second;
      }
      case Establisher::Kind::ActionEffect: {
        const NodeId& producer = activity_ids_.at(e.producer);
        const std::string key = text + "@" + producer;
        if (auto it = derived_.find(key); it != derived_.end()) return it->second;
        const NodeId id = allocate(text);
        graph_.add_node(ProvNode{id, NodeKind::Entity, NodeSubtype::Belief, text, literal_attributes(e.literal)});
        graph_.add_edge(ProvEdge{id, producer, Relation::WasGeneratedBy});
        derived_.emplace(key, id);
        return id;
      }
      case Establisher::Kind::AxiomDerivation: {
        std::vector<NodeId> parents;
        for (const auto& child : e.antecedents) {
          if (child.literal.negated) continue;
          parents.push_back(belief_for(child));
        }
        std::sort(parents.begin(), parents.end());
        parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
        std::string key = text + "<=" + e.axiom;
        for (const auto& parent : parents) key += "|" + parent;
        if (auto it = derived_.find(key); it != derived_.end()) return it->second;
        auto attributes = literal_attributes(e.literal);
        attributes["axiom"] = e.axiom;
        const NodeId id = allocate(text);
        graph_.add_node(ProvNode{id, NodeKind::Entity, NodeSubtype::Belief, text, std::move(attributes)});
        for (const auto& parent : parents) graph_.add_edge(ProvEdge{id, parent, Relation::WasDerivedFrom});
        derived_.emplace(key, id);
        return id;
      }
    }
    return {};
  }

  // Effects that survive to the end of the plan and are never consumed.
  static std::vector<Literal> implicit_goals(const PlanTree& plan) {
    std::set<std::pair<std::string, std::size_t>> consumed;
    std::function<void(const Establisher&)> visit = [&](const Establisher& e) {
      if (e.kind == Establisher::Kind::ActionEffect) consumed.emplace(e.literal.to_string(), e.producer);
      for (const auto& child : e.antecedents) visit(child);
    };
    for (const auto& link : plan.links) visit(link.establisher);

    std::map<std::string, std::pair<Literal, std::size_t>> final_effects;
    for (std::size_t i = 0; i < plan.actions.size(); ++i) {
      for (const auto& lit : plan.actions[i].del) final_effects.erase(lit.to_string());
      for (const auto& lit : plan.actions[i].add)
        final_effects.try_emplace(lit.to_string(), lit, i);
    }
    std::vector<Literal> goals;
    for (const auto& [text, effect] : final_effects)
      if (!consumed.contains({text, effect.second})) goals.push_back(effect.first);
    return goals;
  }

  void map_goals(const PlanTree& plan) {
    // Final state with origins, mirroring the planner's add-if-absent rule.
    std::map<std::string, std::optional<std::size_t>> final_state;
    for (const auto& fact : problem_.state) final_state.try_emplace(fact.literal.to_string(), std::nullopt);
    for (std::size_t i = 0; i < plan.actions.size(); ++i) {
      for (const auto& lit : plan.actions[i].del) final_state.erase(lit.to_string());
      for (const auto& lit : plan.actions[i].add) final_state.try_emplace(lit.to_string(), i);
    }

    const auto goals = problem_.goals.empty() ? implicit_goals(plan) : problem_.goals;
    for (const auto& goal : goals) {
      const std::string text = goal.to_string();
      auto it = final_state.find(text);
      if (it == final_state.end()) {
        if (std::find(report_.unachieved_goals.begin(), report_.unachieved_goals.end(), text) ==
            report_.unachieved_goals.end())
          report_.unachieved_goals.push_back(text);
        continue;
      }
      const NodeId goal_id = ensure_goal(goal);
      if (it->second) {
        const NodeId& producer = activity_ids_.at(*it->second);
        graph_.add_edge(ProvEdge{goal_id, producer, Relation::WasGeneratedBy});
        goal_producers_[goal_id].insert(producer);
      } else {
        graph_.add_edge(ProvEdge{goal_id, initial_beliefs_.at(text), Relation::WasDerivedFrom});
      }
    }
  }

  NodeId ensure_goal(const Literal& goal) {
    const std::string text = goal.to_string();
    if (auto it = goals_.find(text); it != goals_.end()) return it->second;
    reserving_goal_ = true;
    const NodeId id = allocate(text);
    reserving_goal_ = false;
    graph_.add_node(ProvNode{id, NodeKind::Entity, NodeSubtype::Goal, text, literal_attributes(goal)});
    goals_.emplace(text, id);
    return id;
  }

  const Problem& problem_;
  ProvGraph graph_;
  MappingReport report_;
  std::unordered_set<std::string> used_ids_;
  std::unordered_set<std::string> reserved_;
  bool reserving_goal_ = false;
  std::unordered_set<std::string> agents_;
  std::unordered_map<std::string, NodeId> initial_beliefs_;
  std::unordered_map<std::string, NodeId> derived_;
  std::unordered_map<std::string, NodeId> activity_keys_;
  std::map<std::string, NodeId> goals_;
  std::map<NodeId, std::set<NodeId>> goal_producers_;
  std::vector<NodeId> activity_ids_;
};

}  // namespace

void verify_plan(const Problem& problem, const PlanTree& plan) {
  std::map<std::string, Origin> state;
  for (const auto& fact : problem.state) {
    if (fact.source && !problem.find_source(*fact.source))
      throw Error(ErrorCode::UnknownSource, "unknown information source " + *fact.source);
    state.try_emplace(fact.literal.to_string(), Origin{});
  }

  std::vector<std::vector<const CausalLink*>> links_by_action(plan.actions.size());
  for (const auto& link : plan.links) {
    check_sources(link.establisher, problem);
    if (link.consumer.kind != Consumer::Kind::Action) continue;
    if (link.consumer.index >= plan.actions.size())
      throw Error(ErrorCode::UnreplayablePlan, "causal link names a missing action");
    links_by_action[link.consumer.index].push_back(&link);
  }

  for (std::size_t i = 0; i < plan.actions.size(); ++i) {
    const auto& action = plan.actions[i];
    if (links_by_action[i].size() != action.preconditions.size())
      unreplayable(i, "expected one causal link per precondition");
    for (std::size_t k = 0; k < action.preconditions.size(); ++k) {
      const auto& link = *links_by_action[i][k];
      const auto& pre = action.preconditions[k];
      if (link.condition != pre) unreplayable(i, "causal link condition differs from precondition " + pre.to_string());
      if (pre.negated) {
        if (state.contains(pre.positive().to_string())) unreplayable(i, pre.to_string() + " is violated");
        continue;
      }
      if (link.establisher.literal != pre) unreplayable(i, "establisher does not establish " + pre.to_string());
      check_establisher(link.establisher, problem, state, i);
    }
    for (const auto& lit : action.del) state.erase(lit.to_string());
    for (const auto& lit : action.add) state.try_emplace(lit.to_string(), Origin{i});
  }
}

MappingResult plan_to_prov(std::span<const PlanTree> plans, const Problem& problem,
                           std::span<const Appraisal> appraisals) {
  for (const auto& plan : plans) verify_plan(problem, plan);
  Mapper mapper(problem);
  mapper.reserve_goals(plans);
  mapper.add_sources_and_agents();
  mapper.add_initial_beliefs();
  for (const auto& plan : plans) mapper.map_plan(plan);
  for (const auto& appraisal : appraisals) attach_appraisal(mapper.graph(), appraisal);
  return mapper.finish();
}

void attach_appraisal(ProvGraph& graph, Appraisal appraisal) { graph.add_appraisal(std::move(appraisal)); }

nlohmann::json to_json(const MappingReport& report) {
  return {{"nodes_by_subtype", report.nodes_by_subtype},
          {"edges_by_relation", report.edges_by_relation},
          {"unsourced_facts", report.unsourced_facts},
          {"merged_goals", report.merged_goals},
          {"unachieved_goals", report.unachieved_goals},
          {"skipped_ordering_edges", report.skipped_ordering_edges}};
}

}  // namespace provex
