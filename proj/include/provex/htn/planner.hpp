#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "provex/htn/domain.hpp"
#include "provex/htn/prover.hpp"

namespace provex::htn {

// A ground operator application. Preconditions and effects are stored ground
// so a plan can be checked and mapped without the domain at hand.
struct ActionInstance {
  std::string op;  // model link: the operator that justifies this action
  std::vector<std::string> args;
  std::optional<std::string> agent;
  std::vector<Literal> preconditions;
  std::vector<Literal> add;
  std::vector<Literal> del;

  Literal as_literal() const;
  std::string to_string() const { return as_literal().to_string(); }
  bool operator==(const ActionInstance&) const = default;
};

struct Consumer {
  enum class Kind { Action, Method };
  Kind kind = Kind::Action;
  std::size_t index = 0;  // action index, or decomposition node index for methods

  bool operator==(const Consumer&) const = default;
};

struct CausalLink {
  Consumer consumer;
  Literal condition;  // ground; negated for negation-as-failure checks
  Establisher establisher;

  bool operator==(const CausalLink&) const = default;
};

struct DecompositionNode {
  Literal task;
  std::string method;                  // model link; empty for primitive tasks
  std::optional<std::size_t> action;   // set for primitive tasks
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;
  std::size_t position = 0;            // number of actions emitted before this node

  bool operator==(const DecompositionNode&) const = default;
};

struct PlanTree {
  std::vector<std::size_t> roots;
  std::vector<DecompositionNode> nodes;
  std::vector<ActionInstance> actions;  // execution order
  std::vector<CausalLink> links;

  bool operator==(const PlanTree&) const = default;
};

struct PlannerOptions {
  std::size_t depth_bound = kDefaultDepthBound;
};

// First plan in declared method/binding order. Throws Unsolvable, or
// DepthExceeded when the search ran out of options only because the
// decomposition depth bound cut branches off.
PlanTree seek_plan(const Domain& domain, const Problem& problem, PlannerOptions options = {});

// Up to `limit` plans with distinct action sequences, in search order.
// Returns an empty list for unsolvable problems.
std::vector<PlanTree> all_plans(const Domain& domain, const Problem& problem, std::size_t limit,
                                PlannerOptions options = {});

struct ReplayFailure {
  std::size_t index;  // first action that cannot be applied
  Literal literal;    // its first unsatisfied precondition
  bool operator==(const ReplayFailure&) const = default;
};

// Simulates the actions from the initial state using the domain's operators.
// Returns nothing when every precondition holds at its position.
std::optional<ReplayFailure> replay(const Domain& domain, const Problem& problem,
                                    std::span<const ActionInstance> actions,
                                    std::size_t depth_bound = kDefaultDepthBound);

}  // namespace provex::htn
