#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "provex/htn/domain.hpp"
#include "provex/htn/term.hpp"

namespace provex::htn {

inline constexpr std::size_t kDefaultDepthBound = 64;

// How a condition came to hold: read off the initial state, produced by an
// earlier action, or derived by an axiom from further establishers.
struct Establisher {
  enum class Kind { InitialFact, ActionEffect, AxiomDerivation };

  Kind kind = Kind::InitialFact;
  Literal literal;                    // the established (ground) literal
  std::optional<std::string> source;  // InitialFact
  std::size_t producer = 0;           // ActionEffect: index of the producing action
  std::string axiom;                  // AxiomDerivation
  std::vector<Establisher> antecedents;

  static Establisher initial(Literal literal, std::optional<std::string> source);
  static Establisher effect(Literal literal, std::size_t producer);
  static Establisher derived(Literal literal, std::string axiom, std::vector<Establisher> antecedents);

  // Nesting depth of axiom derivations (0 for leaves).
  std::size_t depth() const;
  bool operator==(const Establisher&) const = default;
};

std::string_view to_string(Establisher::Kind kind);

struct FactOrigin {
  std::optional<std::size_t> producer;  // set for action effects
  std::optional<std::string> source;    // set for annotated initial facts
};

// Ground positive facts in insertion order, each remembering what put it there.
class State {
 public:
  State() = default;
  explicit State(const Problem& problem);

  bool contains(const Literal& literal) const;
  void add(const Literal& literal, FactOrigin origin);
  void remove(const Literal& literal);

  struct Fact {
    Literal literal;
    FactOrigin origin;
  };
  const std::vector<Fact>& facts() const { return facts_; }

  Establisher establisher_for(const Fact& fact) const;

 private:
  std::vector<Fact> facts_;
};

struct Proof {
  std::map<std::string, std::string> binding;  // goal variables -> constants
  Establisher trace;
};

struct ProveResult {
  std::vector<Proof> proofs;
  bool depth_exceeded = false;
};

// Backward chaining over the state and Horn axioms. Proofs come out in
// state-insertion order first, then axiom declaration order.
ProveResult prove(const State& state, const Literal& goal, std::span<const Axiom> axioms,
                  std::size_t depth_bound = kDefaultDepthBound);

// Conjunctive query used for operator/method preconditions. The callback
// receives each solution with one establisher per literal (negated literals
// get an InitialFact establisher for their negation, no source) and returns
// false to stop the enumeration.
class Prover {
 public:
  Prover(const State& state, std::span<const Axiom> axioms, std::size_t depth_bound);

  using Solution = std::function<bool(const Substitution&, const std::vector<Establisher>&)>;
  void solve(const std::vector<Literal>& goals, const Substitution& initial, const Solution& on_solution);

  bool depth_exceeded() const { return depth_exceeded_; }

 private:
  using Emit = std::function<bool(const Substitution&, Establisher)>;
  bool prove_literal(const Literal& goal, const Substitution& subst, std::size_t depth, const Emit& emit);
  bool prove_all(const std::vector<Literal>& goals, std::size_t index, const Substitution& subst,
                 std::size_t depth, std::vector<Establisher>& traces,
                 const std::function<bool(const Substitution&, const std::vector<Establisher>&)>& emit);
  Literal rename(const Literal& literal, std::size_t stamp) const;

  const State& state_;
  std::span<const Axiom> axioms_;
  std::size_t depth_bound_;
  std::size_t next_stamp_ = 0;
  bool depth_exceeded_ = false;
};

}  // namespace provex::htn
