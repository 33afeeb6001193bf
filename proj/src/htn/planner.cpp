#include "provex/htn/planner.hpp"

#include <map>
#include <set>

#include "provex/error.hpp"

namespace provex::htn {

Literal ActionInstance::as_literal() const {
  Literal literal;
  literal.predicate = op;
  for (const auto& arg : args) literal.args.push_back(Term{arg});
  return literal;
}

namespace {

Literal operator_head(const Operator& op) {
  return Literal{op.name, op.parameters, false};
}

std::set<std::string> variables_of(const std::vector<Literal>& list, const Literal& head) {
  std::set<std::string> vars;
  head.collect_variables(vars);
  for (const auto& literal : list) literal.collect_variables(vars);
  return vars;
}

struct Solution {
  Substitution subst;
  std::vector<Establisher> traces;
};

// Distinct solutions of `goals` under `seed`, keyed on the bindings of `vars`.
std::vector<Solution> solve_distinct(Prover& prover, const std::vector<Literal>& goals, const Substitution& seed,
                                     const std::set<std::string>& vars) {
  std::vector<Solution> out;
  std::set<std::map<std::string, std::string>> seen;
  prover.solve(goals, seed, [&](const Substitution& subst, const std::vector<Establisher>& traces) {
    if (seen.insert(subst.restrict_to(vars)).second) out.push_back(Solution{subst, traces});
    return true;
  });
  return out;
}

class Search {
 public:
  Search(const Domain& domain, const Problem& problem, PlannerOptions options, std::size_t limit)
      : domain_(domain), problem_(problem), options_(options), limit_(limit) {}

  void run() {
    std::vector<Pending> agenda;
    for (auto it = problem_.tasks.rbegin(); it != problem_.tasks.rend(); ++it)
      agenda.push_back(Pending{*it, std::nullopt, 0});
    expand(State(problem_), std::move(agenda));
  }

  std::vector<PlanTree> plans;
  bool depth_cutoff = false;

 private:
  struct Pending {
    Literal task;
    std::optional<std::size_t> parent;
    std::size_t depth;
  };

  struct Mark {
    std::size_t nodes, actions, links, siblings;
  };

  std::vector<std::size_t>& siblings(const std::optional<std::size_t>& parent) {
    return parent ? tree_.nodes[*parent].children : tree_.roots;
  }

  Mark mark(const std::optional<std::size_t>& parent) {
    return {tree_.nodes.size(), tree_.actions.size(), tree_.links.size(), siblings(parent).size()};
  }

  void rollback(const Mark& m, const std::optional<std::size_t>& parent) {
    siblings(parent).resize(m.siblings);
    tree_.nodes.resize(m.nodes);
    tree_.actions.resize(m.actions);
    tree_.links.resize(m.links);
  }

  std::size_t push_node(DecompositionNode node) {
    const std::size_t index = tree_.nodes.size();
    siblings(node.parent).push_back(index);
    tree_.nodes.push_back(std::move(node));
    return index;
  }

  // Returns false once enough plans have been collected.
  bool expand(const State& state, std::vector<Pending> agenda) {
    if (agenda.empty()) {
      std::vector<std::string> key;
      for (const auto& action : tree_.actions) key.push_back(action.to_string());
      if (seen_plans_.insert(key).second) plans.push_back(tree_);
      return plans.size() < limit_;
    }
    Pending next = std::move(agenda.back());
    agenda.pop_back();

    if (const auto* op = domain_.find_operator(next.task.predicate, next.task.args.size()))
      return apply_operator(*op, next, state, agenda);
    return decompose(next, state, agenda);
  }

  bool apply_operator(const Operator& op, const Pending& task, const State& state,
                      const std::vector<Pending>& agenda) {
    Substitution seed;
    if (!unify(operator_head(op), task.task, seed)) return true;
    Prover prover(state, domain_.axioms, options_.depth_bound);
    auto solutions = solve_distinct(prover, op.preconditions, seed, variables_of(op.preconditions, operator_head(op)));

    for (const auto& solution : solutions) {
      ActionInstance action;
      action.op = op.name;
      for (const auto& p : op.parameters) action.args.push_back(solution.subst.resolve(p).text);
      if (op.agent) {
        action.agent = solution.subst.resolve(*op.agent).text;
      } else {
        for (const auto& arg : action.args)
          if (problem_.is_agent(arg)) {
            action.agent = arg;
            break;
          }
      }
      for (const auto& pre : op.preconditions) action.preconditions.push_back(solution.subst.apply(pre));
      for (const auto& lit : op.add) action.add.push_back(solution.subst.apply(lit));
      for (const auto& lit : op.del) action.del.push_back(solution.subst.apply(lit));

      const Mark saved = mark(task.parent);
      const std::size_t index = tree_.actions.size();
      push_node(DecompositionNode{task.task, "", index, task.parent, {}, index});
      for (std::size_t i = 0; i < action.preconditions.size(); ++i)
        tree_.links.push_back(CausalLink{Consumer{Consumer::Kind::Action, index}, action.preconditions[i],
                                         solution.traces[i]});

      State successor = state;
      for (const auto& lit : action.del) successor.remove(lit);
      for (const auto& lit : action.add) successor.add(lit, FactOrigin{index, std::nullopt});
      tree_.actions.push_back(std::move(action));

      const bool keep_going = expand(successor, agenda);
      rollback(saved, task.parent);
      if (!keep_going) return false;
    }
    return true;
  }

  bool decompose(const Pending& task, const State& state, const std::vector<Pending>& agenda) {
    for (const auto& method : domain_.methods) {
      if (method.task.predicate != task.task.predicate || method.task.args.size() != task.task.args.size())
        continue;
      if (task.depth >= options_.depth_bound) {
        depth_cutoff = true;
        return true;
      }
      Substitution seed;
      if (!unify(method.task, task.task, seed)) continue;
      Prover prover(state, domain_.axioms, options_.depth_bound);
      auto solutions =
          solve_distinct(prover, method.preconditions, seed, variables_of(method.preconditions, method.task));

      for (const auto& solution : solutions) {
        const Mark saved = mark(task.parent);
        const std::size_t node =
            push_node(DecompositionNode{task.task, method.id, std::nullopt, task.parent, {}, tree_.actions.size()});
        for (std::size_t i = 0; i < method.preconditions.size(); ++i)
          tree_.links.push_back(CausalLink{Consumer{Consumer::Kind::Method, node},
                                           solution.subst.apply(method.preconditions[i]), solution.traces[i]});
        std::vector<Pending> extended = agenda;
        for (auto it = method.subtasks.rbegin(); it != method.subtasks.rend(); ++it)
          extended.push_back(Pending{solution.subst.apply(*it), node, task.depth + 1});

        const bool keep_going = expand(state, std::move(extended));
        rollback(saved, task.parent);
        if (!keep_going) return false;
      }
    }
    return true;
  }

  const Domain& domain_;
  const Problem& problem_;
  PlannerOptions options_;
  std::size_t limit_;
  PlanTree tree_;
  std::set<std::vector<std::string>> seen_plans_;
};

}  // namespace

PlanTree seek_plan(const Domain& domain, const Problem& problem, PlannerOptions options) {
  Search search(domain, problem, options, 1);
  search.run();
  if (!search.plans.empty()) return std::move(search.plans.front());
  if (search.depth_cutoff)
    throw Error(ErrorCode::DepthExceeded,
                "no plan within decomposition depth " + std::to_string(options.depth_bound));
  throw Error(ErrorCode::Unsolvable, "search space exhausted without a plan");
}

std::vector<PlanTree> all_plans(const Domain& domain, const Problem& problem, std::size_t limit,
                                PlannerOptions options) {
  if (limit == 0) throw Error(ErrorCode::InvalidArgument, "plan limit must be at least 1");
  Search search(domain, problem, options, limit);
  search.run();
  if (search.plans.empty() && search.depth_cutoff)
    throw Error(ErrorCode::DepthExceeded,
                "no plan within decomposition depth " + std::to_string(options.depth_bound));
  return std::move(search.plans);
}

std::optional<ReplayFailure> replay(const Domain& domain, const Problem& problem,
                                    std::span<const ActionInstance> actions, std::size_t depth_bound) {
  State state(problem);
  for (std::size_t index = 0; index < actions.size(); ++index) {
    const auto& action = actions[index];
    const auto* op = domain.find_operator(action.op, action.args.size());
    if (op == nullptr) return ReplayFailure{index, action.as_literal()};

    Substitution seed;
    if (!unify(operator_head(*op), action.as_literal(), seed)) return ReplayFailure{index, action.as_literal()};
    // Pin existential precondition variables to the recorded choice if there is one.
    if (action.preconditions.size() == op->preconditions.size()) {
      Substitution pinned = seed;
      bool consistent = true;
      for (std::size_t i = 0; i < op->preconditions.size() && consistent; ++i)
        consistent = unify(op->preconditions[i], action.preconditions[i], pinned);
      if (consistent) seed = pinned;
    }

    Prover prover(state, domain.axioms, depth_bound);
    std::optional<Substitution> found;
    prover.solve(op->preconditions, seed, [&](const Substitution& subst, const std::vector<Establisher>&) {
      found = subst;
      return false;
    });

    if (!found) {
      for (std::size_t k = 1; k <= op->preconditions.size(); ++k) {
        std::vector<Literal> prefix(op->preconditions.begin(), op->preconditions.begin() + k);
        bool satisfiable = false;
        Prover probe(state, domain.axioms, depth_bound);
        probe.solve(prefix, seed, [&](const Substitution&, const std::vector<Establisher>&) {
          satisfiable = true;
          return false;
        });
        if (!satisfiable) return ReplayFailure{index, seed.apply(op->preconditions[k - 1])};
      }
      return ReplayFailure{index, action.as_literal()};
    }

    for (const auto& lit : op->del) state.remove(found->apply(lit));
    for (const auto& lit : op->add) state.add(found->apply(lit), FactOrigin{index, std::nullopt});
  }
  return std::nullopt;
}

}  // namespace provex::htn
