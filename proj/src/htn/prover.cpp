#include "provex/htn/prover.hpp"

#include <algorithm>

namespace provex::htn {

Establisher Establisher::initial(Literal literal, std::optional<std::string> source) {
  Establisher e;
  e.kind = Kind::InitialFact;
  e.literal = std::move(literal);
  e.source = std::move(source);
  return e;
}

Establisher Establisher::effect(Literal literal, std::size_t producer) {
  Establisher e;
  e.kind = Kind::ActionEffect;
  e.literal = std::move(literal);
  e.producer = producer;
  return e;
}

Establisher Establisher::derived(Literal literal, std::string axiom, std::vector<Establisher> antecedents) {
  Establisher e;
  e.kind = Kind::AxiomDerivation;
  e.literal = std::move(literal);
  e.axiom = std::move(axiom);
  e.antecedents = std::move(antecedents);
  return e;
}

std::size_t Establisher::depth() const {
  std::size_t deepest = 0;
  for (const auto& child : antecedents) deepest = std::max(deepest, child.depth());
  return kind == Kind::AxiomDerivation ? deepest + 1 : 0;
}

std::string_view to_string(Establisher::Kind kind) {
  switch (kind) {
    case Establisher::Kind::InitialFact: return "initial_fact";
    case Establisher::Kind::ActionEffect: return "action_effect";
    case Establisher::Kind::AxiomDerivation: return "axiom";
  }
  return "?";
}

State::State(const Problem& problem) {
  for (const auto& fact : problem.state) add(fact.literal, FactOrigin{std::nullopt, fact.source});
}

bool State::contains(const Literal& literal) const {
  return std::any_of(facts_.begin(), facts_.end(), [&](const Fact& f) { return f.literal == literal; });
}

void State::add(const Literal& literal, FactOrigin origin) {
  if (contains(literal)) return;
  facts_.push_back(Fact{literal, std::move(origin)});
}

void State::remove(const Literal& literal) {
  std::erase_if(facts_, [&](const Fact& f) { return f.literal == literal; });
}

Establisher State::establisher_for(const Fact& fact) const {
  if (fact.origin.producer) return Establisher::effect(fact.literal, *fact.origin.producer);
  return Establisher::initial(fact.literal, fact.origin.source);
}

Prover::Prover(const State& state, std::span<const Axiom> axioms, std::size_t depth_bound)
    : state_(state), axioms_(axioms), depth_bound_(depth_bound) {}

void Prover::solve(const std::vector<Literal>& goals, const Substitution& initial, const Solution& on_solution) {
  std::vector<Establisher> traces;
  prove_all(goals, 0, initial, 0, traces, on_solution);
}

Literal Prover::rename(const Literal& literal, std::size_t stamp) const {
  Literal out = literal;
  for (auto& arg : out.args)
    if (arg.is_variable()) arg.text += "~" + std::to_string(stamp);
  return out;
}

bool Prover::prove_literal(const Literal& goal, const Substitution& subst, std::size_t depth, const Emit& emit) {
  const Literal target = subst.apply(goal.positive());
  for (const auto& fact : state_.facts()) {
    if (fact.literal.predicate != target.predicate) continue;
    Substitution extended = subst;
    if (unify(target, fact.literal, extended))
      if (!emit(extended, state_.establisher_for(fact))) return false;
  }

  for (const auto& axiom : axioms_) {
    if (axiom.head.predicate != target.predicate || axiom.head.args.size() != target.args.size()) continue;
    const std::size_t stamp = next_stamp_++;
    Substitution extended = subst;
    if (!unify(target, rename(axiom.head, stamp), extended)) continue;
    if (depth >= depth_bound_) {
      depth_exceeded_ = true;
      continue;
    }
    std::vector<Literal> body;
    body.reserve(axiom.body.size());
    for (const auto& literal : axiom.body) body.push_back(rename(literal, stamp));
    std::vector<Establisher> traces;
    const bool keep_going =
        prove_all(body, 0, extended, depth + 1, traces,
                  [&](const Substitution& solved, const std::vector<Establisher>& antecedents) {
                    return emit(solved, Establisher::derived(solved.apply(target), axiom.id, antecedents));
                  });
    if (!keep_going) return false;
  }
  return true;
}

bool Prover::prove_all(const std::vector<Literal>& goals, std::size_t index, const Substitution& subst,
                       std::size_t depth, std::vector<Establisher>& traces,
                       const std::function<bool(const Substitution&, const std::vector<Establisher>&)>& emit) {
  if (index == goals.size()) return emit(subst, traces);
  const Literal& goal = goals[index];

  if (goal.negated) {
    // Negation as failure: the branch survives only if no proof exists.
    bool provable = false;
    prove_literal(goal, subst, depth, [&](const Substitution&, const Establisher&) {
      provable = true;
      return false;
    });
    if (provable) return true;
    Literal absent = subst.apply(goal);
    traces.push_back(Establisher::initial(std::move(absent), std::nullopt));
    const bool keep_going = prove_all(goals, index + 1, subst, depth, traces, emit);
    traces.pop_back();
    return keep_going;
  }

  return prove_literal(goal, subst, depth, [&](const Substitution& extended, Establisher trace) {
    traces.push_back(std::move(trace));
    const bool keep_going = prove_all(goals, index + 1, extended, depth, traces, emit);
    traces.pop_back();
    return keep_going;
  });
}

ProveResult prove(const State& state, const Literal& goal, std::span<const Axiom> axioms, std::size_t depth_bound) {
  ProveResult result;
  Prover prover(state, axioms, depth_bound);
  std::set<std::string> variables;
  goal.collect_variables(variables);
  prover.solve({goal}, Substitution{}, [&](const Substitution& subst, const std::vector<Establisher>& traces) {
    result.proofs.push_back(Proof{subst.restrict_to(variables), traces.front()});
    return true;
  });
  result.depth_exceeded = prover.depth_exceeded();
  return result;
}

}  // namespace provex::htn
