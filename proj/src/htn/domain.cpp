#include "provex/htn/domain.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "provex/error.hpp"

namespace provex::htn {

namespace {

using nlohmann::json;

const json& field(const json& object, const char* key, const std::string& context) {
  if (!object.is_object() || !object.contains(key))
    throw Error(ErrorCode::Parse, context + ": missing \"" + key + "\"");
  return object.at(key);
}

std::string string_field(const json& object, const char* key, const std::string& context) {
  const auto& value = field(object, key, context);
  if (!value.is_string()) throw Error(ErrorCode::Parse, context + ": \"" + key + "\" must be a string");
  return value.get<std::string>();
}

std::vector<std::string> strings(const json& object, const char* key, const std::string& context) {
  std::vector<std::string> out;
  if (!object.is_object() || !object.contains(key) || object.at(key).is_null()) return out;
  const auto& list = object.at(key);
  if (!list.is_array()) throw Error(ErrorCode::Parse, context + ": \"" + key + "\" must be an array");
  for (const auto& item : list) {
    if (!item.is_string()) throw Error(ErrorCode::Parse, context + ": \"" + key + "\" holds a non-string");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::vector<Literal> literals(const json& object, const char* key, const std::string& context) {
  std::vector<Literal> out;
  for (const auto& text : strings(object, key, context)) out.push_back(parse_literal(text));
  return out;
}

const json& array_or_empty(const json& document, const char* key) {
  static const json empty = json::array();
  if (!document.contains(key) || document.at(key).is_null()) return empty;
  if (!document.at(key).is_array())
    throw Error(ErrorCode::Parse, std::string("\"") + key + "\" must be an array");
  return document.at(key);
}

json literal_list(const std::vector<Literal>& list) {
  json out = json::array();
  for (const auto& literal : list) out.push_back(literal.to_string());
  return out;
}

std::set<std::string> positive_variables(const std::vector<Literal>& list) {
  std::set<std::string> out;
  for (const auto& literal : list)
    if (!literal.negated) literal.collect_variables(out);
  return out;
}

void require_covered(const std::vector<Literal>& list, const std::set<std::string>& allowed,
                     const std::string& where, std::vector<std::string>& problems) {
  for (const auto& literal : list) {
    std::set<std::string> vars;
    literal.collect_variables(vars);
    for (const auto& var : vars)
      if (!allowed.contains(var))
        problems.push_back(where + ": variable " + var + " in " + literal.to_string() + " is never bound");
  }
}

void require_positive(const std::vector<Literal>& list, const std::string& where,
                      std::vector<std::string>& problems) {
  for (const auto& literal : list)
    if (literal.negated) problems.push_back(where + ": negation is only allowed in preconditions");
}

std::string join(const std::vector<std::string>& problems) {
  std::ostringstream out;
  for (std::size_t i = 0; i < problems.size(); ++i) out << (i ? "; " : "") << problems[i];
  return out.str();
}

}  // namespace

const Operator* Domain::find_operator(const std::string& name, std::size_t arity) const {
  for (const auto& op : operators)
    if (op.name == name && op.parameters.size() == arity) return &op;
  return nullptr;
}

bool Problem::is_agent(const std::string& constant) const {
  return std::any_of(agents.begin(), agents.end(), [&](const AgentDecl& a) { return a.id == constant; });
}

const SourceDecl* Problem::find_source(const std::string& id) const {
  for (const auto& source : sources)
    if (source.id == id) return &source;
  return nullptr;
}

std::vector<std::string> validate(const Domain& domain) {
  std::vector<std::string> problems;

  std::set<std::string> operator_names;
  std::set<std::pair<std::string, std::size_t>> primitive_tasks;
  for (const auto& op : domain.operators) {
    const std::string where = "operator " + op.name;
    if (!operator_names.insert(op.name).second) problems.push_back(where + ": duplicate name");
    primitive_tasks.emplace(op.name, op.parameters.size());
    std::set<std::string> params;
    for (const auto& p : op.parameters) {
      if (!p.is_variable()) problems.push_back(where + ": parameter " + p.text + " is not a variable");
      if (!params.insert(p.text).second) problems.push_back(where + ": repeated parameter " + p.text);
    }
    if (op.agent && !params.contains(op.agent->text))
      problems.push_back(where + ": agent " + op.agent->text + " is not a parameter");
    std::set<std::string> bound = params;
    bound.merge(positive_variables(op.preconditions));
    require_positive(op.add, where + " add", problems);
    require_positive(op.del, where + " delete", problems);
    require_covered(op.add, bound, where, problems);
    require_covered(op.del, bound, where, problems);
  }

  std::set<std::pair<std::string, std::size_t>> compound_tasks;
  std::set<std::string> method_ids;
  for (const auto& method : domain.methods) {
    if (!method_ids.insert(method.id).second) problems.push_back("method " + method.id + ": duplicate id");
    compound_tasks.emplace(method.task.predicate, method.task.args.size());
  }
  for (const auto& method : domain.methods) {
    const std::string where = "method " + method.id;
    if (method.task.negated) problems.push_back(where + ": task cannot be negated");
    if (primitive_tasks.contains({method.task.predicate, method.task.args.size()}))
      problems.push_back(where + ": task " + method.task.predicate + " is also an operator");
    std::set<std::string> bound;
    method.task.collect_variables(bound);
    bound.merge(positive_variables(method.preconditions));
    require_positive(method.subtasks, where + " subtasks", problems);
    require_covered(method.subtasks, bound, where, problems);
    for (const auto& sub : method.subtasks) {
      std::pair<std::string, std::size_t> key{sub.predicate, sub.args.size()};
      if (!primitive_tasks.contains(key) && !compound_tasks.contains(key))
        problems.push_back(where + ": subtask " + sub.to_string() + " names no operator or task");
    }
  }

  std::set<std::string> axiom_ids;
  for (const auto& axiom : domain.axioms) {
    const std::string where = "axiom " + axiom.id;
    if (!axiom_ids.insert(axiom.id).second) problems.push_back(where + ": duplicate id");
    if (axiom.head.negated) problems.push_back(where + ": head cannot be negated");
    require_covered({axiom.head}, positive_variables(axiom.body), where, problems);
  }
  return problems;
}

std::vector<std::string> validate(const Problem& problem) {
  std::vector<std::string> problems;
  std::set<std::string> source_ids;
  for (const auto& source : problem.sources)
    if (!source_ids.insert(source.id).second) problems.push_back("source " + source.id + ": duplicate id");
  std::set<std::string> agent_ids;
  for (const auto& agent : problem.agents)
    if (!agent_ids.insert(agent.id).second) problems.push_back("agent " + agent.id + ": duplicate id");
  for (const auto& fact : problem.state) {
    const std::string text = fact.literal.to_string();
    if (fact.literal.negated || !fact.literal.is_ground())
      problems.push_back("state " + text + ": must be ground and positive");
    if (fact.source && !source_ids.contains(*fact.source))
      problems.push_back("state " + text + ": unknown source " + *fact.source);
  }
  for (const auto& task : problem.tasks)
    if (task.negated || !task.is_ground()) problems.push_back("task " + task.to_string() + ": must be ground");
  for (const auto& goal : problem.goals)
    if (goal.negated || !goal.is_ground()) problems.push_back("goal " + goal.to_string() + ": must be ground");
  return problems;
}

Domain domain_from_json(const json& document) {
  if (!document.is_object()) throw Error(ErrorCode::Parse, "domain must be an object");
  Domain domain;
  for (const auto& item : array_or_empty(document, "operators")) {
    Operator op;
    op.name = string_field(item, "name", "operator");
    const std::string where = "operator " + op.name;
    for (const auto& p : strings(item, "parameters", where)) op.parameters.push_back(Term{p});
    if (item.contains("agent") && !item.at("agent").is_null()) op.agent = Term{string_field(item, "agent", where)};
    op.preconditions = literals(item, "preconditions", where);
    op.add = literals(item, "add", where);
    op.del = literals(item, item.contains("delete") ? "delete" : "del", where);
    domain.operators.push_back(std::move(op));
  }
  for (const auto& item : array_or_empty(document, "methods")) {
    Method method;
    method.id = string_field(item, "id", "method");
    const std::string where = "method " + method.id;
    method.task = parse_literal(string_field(item, "task", where));
    method.preconditions = literals(item, "preconditions", where);
    method.subtasks = literals(item, "subtasks", where);
    domain.methods.push_back(std::move(method));
  }
  for (const auto& item : array_or_empty(document, "axioms")) {
    Axiom axiom;
    axiom.id = string_field(item, "id", "axiom");
    const std::string where = "axiom " + axiom.id;
    axiom.head = parse_literal(string_field(item, "head", where));
    axiom.body = literals(item, "body", where);
    domain.axioms.push_back(std::move(axiom));
  }
  return domain;
}

Problem problem_from_json(const json& document) {
  if (!document.is_object()) throw Error(ErrorCode::Parse, "problem must be an object");
  Problem problem;
  for (const auto& item : array_or_empty(document, "state")) {
    InitialFact fact;
    if (item.is_string()) {
      fact.literal = parse_literal(item.get<std::string>());
    } else {
      fact.literal = parse_literal(string_field(item, "literal", "state"));
      if (item.contains("source") && !item.at("source").is_null())
        fact.source = string_field(item, "source", "state");
    }
    problem.state.push_back(std::move(fact));
  }
  for (const auto& item : array_or_empty(document, "tasks")) {
    if (!item.is_string()) throw Error(ErrorCode::Parse, "tasks must be strings");
    problem.tasks.push_back(parse_literal(item.get<std::string>()));
  }
  for (const auto& item : array_or_empty(document, "goals")) {
    if (!item.is_string()) throw Error(ErrorCode::Parse, "goals must be strings");
    problem.goals.push_back(parse_literal(item.get<std::string>()));
  }
  for (const auto& item : array_or_empty(document, "sources")) {
    SourceDecl source;
    source.id = string_field(item, "id", "source");
    source.label = item.contains("label") && item.at("label").is_string() ? item.at("label").get<std::string>()
                                                                           : source.id;
    source.disciplines = strings(item, "disciplines", "source " + source.id);
    problem.sources.push_back(std::move(source));
  }
  for (const auto& item : array_or_empty(document, "agents")) {
    AgentDecl agent;
    if (item.is_string()) {
      agent.id = item.get<std::string>();
      agent.label = agent.id;
    } else {
      agent.id = string_field(item, "id", "agent");
      agent.label = item.contains("label") && item.at("label").is_string() ? item.at("label").get<std::string>()
                                                                             : agent.id;
    }
    problem.agents.push_back(std::move(agent));
  }
  return problem;
}

json to_json(const Domain& domain) {
  json operators = json::array();
  for (const auto& op : domain.operators) {
    json params = json::array();
    for (const auto& p : op.parameters) params.push_back(p.text);
    json item = {{"name", op.name},
                 {"parameters", params},
                 {"preconditions", literal_list(op.preconditions)},
                 {"add", literal_list(op.add)},
                 {"delete", literal_list(op.del)}};
    if (op.agent) item["agent"] = op.agent->text;
    operators.push_back(std::move(item));
  }
  json methods = json::array();
  for (const auto& m : domain.methods)
    methods.push_back({{"id", m.id},
                       {"task", m.task.to_string()},
                       {"preconditions", literal_list(m.preconditions)},
                       {"subtasks", literal_list(m.subtasks)}});
  json axioms = json::array();
  for (const auto& a : domain.axioms)
    axioms.push_back({{"id", a.id}, {"head", a.head.to_string()}, {"body", literal_list(a.body)}});
  return {{"operators", operators}, {"methods", methods}, {"axioms", axioms}};
}

json to_json(const Problem& problem) {
  json state = json::array();
  for (const auto& fact : problem.state) {
    json item = {{"literal", fact.literal.to_string()}};
    if (fact.source) item["source"] = *fact.source;
    state.push_back(std::move(item));
  }
  json sources = json::array();
  for (const auto& s : problem.sources)
    sources.push_back({{"id", s.id}, {"label", s.label}, {"disciplines", s.disciplines}});
  json agents = json::array();
  for (const auto& a : problem.agents) agents.push_back({{"id", a.id}, {"label", a.label}});
  return {{"state", state},
          {"tasks", literal_list(problem.tasks)},
          {"goals", literal_list(problem.goals)},
          {"sources", sources},
          {"agents", agents}};
}

Domain load_domain(const json& document) {
  Domain domain = domain_from_json(document);
  if (auto problems = validate(domain); !problems.empty())
    throw Error(ErrorCode::Validation, "invalid domain: " + join(problems));
  return domain;
}

Problem load_problem(const json& document) {
  Problem problem = problem_from_json(document);
  if (auto problems = validate(problem); !problems.empty())
    throw Error(ErrorCode::Validation, "invalid problem: " + join(problems));
  return problem;
}

}  // namespace provex::htn
