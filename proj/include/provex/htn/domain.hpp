#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "provex/htn/term.hpp"

namespace provex::htn {

struct Operator {
  std::string name;
  std::vector<Term> parameters;
  // Parameter naming the acting agent; when absent the first argument that is
  // a declared agent is used.
  std::optional<Term> agent;
  std::vector<Literal> preconditions;
  std::vector<Literal> add;
  std::vector<Literal> del;
};

struct Method {
  std::string id;
  Literal task;
  std::vector<Literal> preconditions;
  std::vector<Literal> subtasks;
};

// head :- body
struct Axiom {
  std::string id;
  Literal head;
  std::vector<Literal> body;
};

struct Domain {
  std::vector<Operator> operators;
  std::vector<Method> methods;
  std::vector<Axiom> axioms;

  const Operator* find_operator(const std::string& name, std::size_t arity) const;
};

struct InitialFact {
  Literal literal;
  std::optional<std::string> source;
};

struct SourceDecl {
  std::string id;
  std::string label;
  std::vector<std::string> disciplines;
};

struct AgentDecl {
  std::string id;
  std::string label;
};

struct Problem {
  std::vector<InitialFact> state;
  std::vector<Literal> tasks;
  std::vector<SourceDecl> sources;
  std::vector<AgentDecl> agents;
  // Optional explicit goal literals used when mapping plans to provenance.
  std::vector<Literal> goals;

  bool is_agent(const std::string& constant) const;
  const SourceDecl* find_source(const std::string& id) const;
};

// Human-readable problems; empty when the input is well formed.
std::vector<std::string> validate(const Domain& domain);
std::vector<std::string> validate(const Problem& problem);

// Structural parsing; throws Error(Parse).
Domain domain_from_json(const nlohmann::json& json);
Problem problem_from_json(const nlohmann::json& json);
nlohmann::json to_json(const Domain& domain);
nlohmann::json to_json(const Problem& problem);

// Parse + validate; throws Error(Validation) listing every problem found.
Domain load_domain(const nlohmann::json& json);
Problem load_problem(const nlohmann::json& json);

}  // namespace provex::htn
