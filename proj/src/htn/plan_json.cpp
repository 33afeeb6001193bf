#include "provex/htn/plan_json.hpp"

#include "provex/error.hpp"

namespace provex::htn {

namespace {

using nlohmann::json;

json literal_list(const std::vector<Literal>& list) {
  json out = json::array();
  for (const auto& literal : list) out.push_back(literal.to_string());
  return out;
}

const json& at(const json& object, const char* key, const char* context) {
  if (!object.is_object() || !object.contains(key))
    throw Error(ErrorCode::Parse, std::string(context) + ": missing \"" + key + "\"");
  return object.at(key);
}

std::vector<Literal> parse_literals(const json& object, const char* key, const char* context) {
  std::vector<Literal> out;
  if (!object.contains(key)) return out;
  for (const auto& item : object.at(key)) {
    if (!item.is_string()) throw Error(ErrorCode::Parse, std::string(context) + ": literal must be a string");
    out.push_back(parse_literal(item.get<std::string>()));
  }
  return out;
}

std::size_t as_index(const json& value, const char* context) {
  if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0))
    throw Error(ErrorCode::Parse, std::string(context) + ": expected a non-negative index");
  return value.get<std::size_t>();
}

}  // namespace

json to_json(const Establisher& e) {
  json out = {{"kind", to_string(e.kind)}, {"literal", e.literal.to_string()}};
  switch (e.kind) {
    case Establisher::Kind::InitialFact:
      out["source"] = e.source ? json(*e.source) : json(nullptr);
      break;
    case Establisher::Kind::ActionEffect:
      out["producer"] = e.producer;
      break;
    case Establisher::Kind::AxiomDerivation: {
      out["axiom"] = e.axiom;
      json antecedents = json::array();
      for (const auto& child : e.antecedents) antecedents.push_back(to_json(child));
      out["antecedents"] = std::move(antecedents);
      break;
    }
  }
  return out;
}

json to_json(const ActionInstance& action) {
  return {{"operator", action.op},
          {"args", action.args},
          {"agent", action.agent ? json(*action.agent) : json(nullptr)},
          {"preconditions", literal_list(action.preconditions)},
          {"add", literal_list(action.add)},
          {"delete", literal_list(action.del)}};
}

json to_json(const PlanTree& plan) {
  json actions = json::array();
  for (const auto& action : plan.actions) actions.push_back(to_json(action));
  json nodes = json::array();
  for (const auto& node : plan.nodes) {
    json item = {{"task", node.task.to_string()},
                 {"method", node.method.empty() ? json(nullptr) : json(node.method)},
                 {"action", node.action ? json(*node.action) : json(nullptr)},
                 {"parent", node.parent ? json(*node.parent) : json(nullptr)},
                 {"children", node.children},
                 {"position", node.position}};
    nodes.push_back(std::move(item));
  }
  json links = json::array();
  for (const auto& link : plan.links)
    links.push_back({{"consumer",
                      {{"kind", link.consumer.kind == Consumer::Kind::Action ? "action" : "method"},
                       {"index", link.consumer.index}}},
                     {"condition", link.condition.to_string()},
                     {"establisher", to_json(link.establisher)}});
  return {{"roots", plan.roots}, {"decomposition", nodes}, {"actions", actions}, {"causal_links", links}};
}

json plans_to_json(const std::vector<PlanTree>& plans) {
  json list = json::array();
  for (const auto& plan : plans) list.push_back(to_json(plan));
  return {{"plans", std::move(list)}};
}

Establisher establisher_from_json(const json& item) {
  const auto kind = at(item, "kind", "establisher").get<std::string>();
  Literal literal = parse_literal(at(item, "literal", "establisher").get<std::string>());
  if (kind == "initial_fact") {
    std::optional<std::string> source;
    if (item.contains("source") && item.at("source").is_string()) source = item.at("source").get<std::string>();
    return Establisher::initial(std::move(literal), std::move(source));
  }
  if (kind == "action_effect")
    return Establisher::effect(std::move(literal), as_index(at(item, "producer", "establisher"), "producer"));
  if (kind == "axiom") {
    std::vector<Establisher> antecedents;
    for (const auto& child : at(item, "antecedents", "establisher")) antecedents.push_back(establisher_from_json(child));
    return Establisher::derived(std::move(literal), at(item, "axiom", "establisher").get<std::string>(),
                                std::move(antecedents));
  }
  throw Error(ErrorCode::Parse, "establisher: unknown kind " + kind);
}

PlanTree plan_from_json(const json& document) {
  if (!document.is_object()) throw Error(ErrorCode::Parse, "plan must be an object");
  try {
    PlanTree plan;
    if (document.contains("roots"))
      for (const auto& r : document.at("roots")) plan.roots.push_back(as_index(r, "roots"));
    for (const auto& item : at(document, "actions", "plan")) {
      ActionInstance action;
      action.op = at(item, "operator", "action").get<std::string>();
      action.args = item.value("args", std::vector<std::string>{});
      if (item.contains("agent") && item.at("agent").is_string()) action.agent = item.at("agent").get<std::string>();
      action.preconditions = parse_literals(item, "preconditions", "action");
      action.add = parse_literals(item, "add", "action");
      action.del = parse_literals(item, "delete", "action");
      plan.actions.push_back(std::move(action));
    }
    if (document.contains("decomposition")) {
      for (const auto& item : document.at("decomposition")) {
        DecompositionNode node;
        node.task = parse_literal(at(item, "task", "decomposition").get<std::string>());
        if (item.contains("method") && item.at("method").is_string()) node.method = item.at("method").get<std::string>();
        if (item.contains("action") && !item.at("action").is_null()) node.action = as_index(item.at("action"), "action");
        if (item.contains("parent") && !item.at("parent").is_null()) node.parent = as_index(item.at("parent"), "parent");
        if (item.contains("children"))
          for (const auto& c : item.at("children")) node.children.push_back(as_index(c, "children"));
        if (item.contains("position")) node.position = as_index(item.at("position"), "position");
        plan.nodes.push_back(std::move(node));
      }
    }
    if (document.contains("causal_links")) {
      for (const auto& item : document.at("causal_links")) {
        CausalLink link;
        const auto& consumer = at(item, "consumer", "causal link");
        const auto kind = at(consumer, "kind", "consumer").get<std::string>();
        if (kind != "action" && kind != "method") throw Error(ErrorCode::Parse, "consumer: unknown kind " + kind);
        link.consumer.kind = kind == "action" ? Consumer::Kind::Action : Consumer::Kind::Method;
        link.consumer.index = as_index(at(consumer, "index", "consumer"), "consumer index");
        link.condition = parse_literal(at(item, "condition", "causal link").get<std::string>());
        link.establisher = establisher_from_json(at(item, "establisher", "causal link"));
        plan.links.push_back(std::move(link));
      }
    }
    return plan;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("plan: ") + e.what());
  }
}

std::vector<PlanTree> plans_from_json(const json& document) {
  std::vector<PlanTree> out;
  if (document.is_array()) {
    for (const auto& item : document) out.push_back(plan_from_json(item));
  } else if (document.is_object() && document.contains("plans")) {
    for (const auto& item : document.at("plans")) out.push_back(plan_from_json(item));
  } else {
    out.push_back(plan_from_json(document));
  }
  return out;
}

}  // namespace provex::htn
