#include "provex/graph_json.hpp"

#include <fstream>
#include <sstream>

namespace provex {

namespace {

using nlohmann::json;

const json& require(const json& object, const char* key, const char* context) {
  if (!object.is_object() || !object.contains(key))
    throw Error(ErrorCode::Parse, std::string(context) + ": missing \"" + key + "\"");
  return object.at(key);
}

std::string require_string(const json& object, const char* key, const char* context) {
  const auto& value = require(object, key, context);
  if (!value.is_string())
    throw Error(ErrorCode::Parse, std::string(context) + ": \"" + key + "\" must be a string");
  return value.get<std::string>();
}

std::vector<std::string> string_list(const json& object, const char* key, const char* context) {
  std::vector<std::string> out;
  if (!object.contains(key) || object.at(key).is_null()) return out;
  const auto& list = object.at(key);
  if (!list.is_array())
    throw Error(ErrorCode::Parse, std::string(context) + ": \"" + key + "\" must be an array");
  for (const auto& item : list) {
    if (!item.is_string())
      throw Error(ErrorCode::Parse, std::string(context) + ": \"" + key + "\" holds a non-string");
    out.push_back(item.get<std::string>());
  }
  return out;
}

const json& optional_array(const json& document, const char* key) {
  static const json empty = json::array();
  if (!document.contains(key) || document.at(key).is_null()) return empty;
  const auto& value = document.at(key);
  if (!value.is_array())
    throw Error(ErrorCode::Parse, std::string("graph: \"") + key + "\" must be an array");
  return value;
}

std::string summarize(const std::vector<Violation>& violations) {
  std::ostringstream out;
  out << violations.size() << " graph violation(s)";
  if (!violations.empty())
    out << "; first: " << violations.front().rule << " at " << violations.front().subject;
  return out.str();
}

}  // namespace

json to_json(const ProvNode& node) {
  return {{"id", node.id},
          {"kind", to_string(node.kind)},
          {"subtype", to_string(node.subtype)},
          {"label", node.label},
          {"attributes", node.attributes}};
}

json to_json(const ProvEdge& edge) {
  return {{"from", edge.from}, {"to", edge.to}, {"relation", to_string(edge.relation)}};
}

json to_json(const Appraisal& appraisal) {
  return {{"appraiser", appraisal.appraiser},
          {"subject", appraisal.subject},
          {"confidence", appraisal.confidence ? json(*appraisal.confidence) : json(nullptr)},
          {"assumptions", appraisal.assumptions},
          {"disciplines", appraisal.disciplines}};
}

json to_json(const ProvGraph& graph) {
  json nodes = json::array();
  for (const auto& node : graph.nodes()) nodes.push_back(to_json(node));
  json edges = json::array();
  for (const auto& edge : graph.edges()) edges.push_back(to_json(edge));
  json appraisals = json::array();
  for (const auto& appraisal : graph.appraisals()) appraisals.push_back(to_json(appraisal));
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"appraisals", std::move(appraisals)}};
}

json to_json(const Violation& violation) {
  return {{"rule", violation.rule}, {"subject", violation.subject}, {"message", violation.message}};
}

Appraisal appraisal_from_json(const json& item) {
  if (!item.is_object()) throw Error(ErrorCode::Parse, "appraisal must be an object");
  Appraisal appraisal;
  if (item.contains("appraiser") && !item.at("appraiser").is_null())
    appraisal.appraiser = require_string(item, "appraiser", "appraisal");
  appraisal.subject = require_string(item, "subject", "appraisal");
  if (item.contains("confidence") && !item.at("confidence").is_null()) {
    if (!item.at("confidence").is_number())
      throw Error(ErrorCode::Parse, "appraisal: \"confidence\" must be a number");
    appraisal.confidence = item.at("confidence").get<double>();
  }
  appraisal.assumptions = string_list(item, "assumptions", "appraisal");
  appraisal.disciplines = string_list(item, "disciplines", "appraisal");
  return appraisal;
}

std::vector<Appraisal> appraisals_from_json(const json& document) {
  const json* list = &document;
  if (document.is_object()) list = &optional_array(document, "appraisals");
  if (!list->is_array()) throw Error(ErrorCode::Parse, "appraisals must be an array");
  std::vector<Appraisal> out;
  for (const auto& item : *list) out.push_back(appraisal_from_json(item));
  return out;
}

ProvGraph graph_from_json_unchecked(const json& document) {
  if (!document.is_object()) throw Error(ErrorCode::Parse, "graph document must be an object");

  std::vector<ProvNode> nodes;
  for (const auto& item : optional_array(document, "nodes")) {
    ProvNode node;
    node.id = require_string(item, "id", "node");
    const auto kind_text = require_string(item, "kind", "node");
    auto kind = parse_node_kind(kind_text);
    if (!kind) throw Error(ErrorCode::Parse, "node " + node.id + ": unknown kind " + kind_text);
    node.kind = *kind;
    const auto subtype_text = require_string(item, "subtype", "node");
    auto subtype = parse_node_subtype(subtype_text);
    if (!subtype)
      throw Error(ErrorCode::Parse, "node " + node.id + ": unknown subtype " + subtype_text);
    node.subtype = *subtype;
    if (item.contains("label") && item.at("label").is_string())
      node.label = item.at("label").get<std::string>();
    else
      node.label = node.id;
    if (item.contains("attributes") && !item.at("attributes").is_null()) {
      if (!item.at("attributes").is_object())
        throw Error(ErrorCode::Parse, "node " + node.id + ": attributes must be an object");
      node.attributes = item.at("attributes");
    }
    nodes.push_back(std::move(node));
  }

  std::vector<ProvEdge> edges;
  for (const auto& item : optional_array(document, "edges")) {
    ProvEdge edge;
    edge.from = require_string(item, "from", "edge");
    edge.to = require_string(item, "to", "edge");
    const auto relation_text = require_string(item, "relation", "edge");
    auto relation = parse_relation(relation_text);
    if (!relation) throw Error(ErrorCode::Parse, "edge: unknown relation " + relation_text);
    edge.relation = *relation;
    edges.push_back(std::move(edge));
  }

  std::vector<Appraisal> appraisals;
  for (const auto& item : optional_array(document, "appraisals"))
    appraisals.push_back(appraisal_from_json(item));

  return ProvGraph::from_parts(std::move(nodes), std::move(edges), std::move(appraisals));
}

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(ErrorCode::Validation, summarize(violations)), violations_(std::move(violations)) {}

ProvGraph graph_from_json(const json& document) {
  auto graph = graph_from_json_unchecked(document);
  auto violations = validate(graph);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return graph;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& document) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + path.string());
  out << document.dump(2) << '\n';
}

}  // namespace provex
