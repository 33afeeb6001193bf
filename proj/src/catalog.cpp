#include "provex/catalog.hpp"

#include "provex/error.hpp"

namespace provex {

namespace {

std::string operator_name(const ProvNode& node) {
  if (auto it = node.attributes.find("operator"); it != node.attributes.end() && it->is_string())
    return it->get<std::string>();
  // Fall back to the predicate part of the label.
  const auto paren = node.label.find('(');
  return paren == std::string::npos ? node.label : node.label.substr(0, paren);
}

std::string predicate_name(const ProvNode& node) {
  if (auto it = node.attributes.find("predicate"); it != node.attributes.end() && it->is_string())
    return it->get<std::string>();
  const auto paren = node.label.find('(');
  return paren == std::string::npos ? node.label : node.label.substr(0, paren);
}

}  // namespace

Catalog build_catalog(const ProvGraph& graph) {
  Catalog c;
  for (const auto& node : graph.nodes()) {
    switch (node.subtype) {
      case NodeSubtype::Actor: c.agents.insert(node.id); break;
      case NodeSubtype::InformationSource: c.source_entities.insert(node.id); break;
      case NodeSubtype::Belief:
      case NodeSubtype::Goal: {
        const auto predicate = predicate_name(node);
        if (!predicate.empty()) c.source_classes["pred:" + predicate].insert(node.id);
        break;
      }
      case NodeSubtype::Task: c.operation_classes[operator_name(node)].insert(node.id); break;
    }
    if (auto it = node.attributes.find("disciplines"); it != node.attributes.end() && it->is_array())
      for (const auto& tag : *it)
        if (tag.is_string()) c.source_classes["disc:" + tag.get<std::string>()].insert(node.id);
  }
  for (const auto& appraisal : graph.appraisals())
    for (const auto& tag : appraisal.disciplines)
      if (graph.contains(appraisal.subject)) c.source_classes["disc:" + tag].insert(appraisal.subject);
  return c;
}

std::optional<Dimension> parse_dimension(std::string_view text) {
  if (text == "agents" || text == "agent") return Dimension::Agents;
  if (text == "sources" || text == "source" || text == "source_entities") return Dimension::Sources;
  if (text == "source_classes" || text == "class") return Dimension::SourceClasses;
  if (text == "operation_classes" || text == "op") return Dimension::OperationClasses;
  return std::nullopt;
}

std::string_view to_string(Dimension dimension) {
  switch (dimension) {
    case Dimension::Agents: return "agents";
    case Dimension::Sources: return "sources";
    case Dimension::SourceClasses: return "source_classes";
    case Dimension::OperationClasses: return "operation_classes";
  }
  return "agents";
}

std::set<NodeId> class_members(const Catalog& catalog, Dimension dimension, const std::string& key) {
  auto unknown = [&]() -> std::set<NodeId> {
    throw Error(ErrorCode::UnknownClass, "no " + std::string(to_string(dimension)) + " class named " + key);
  };
  switch (dimension) {
    case Dimension::Agents:
    case Dimension::Sources: {
      const auto& pool = dimension == Dimension::Agents ? catalog.agents : catalog.source_entities;
      auto it = pool.find(key);
      if (it == pool.end()) return unknown();
      return {*it};
    }
    case Dimension::SourceClasses:
      for (const auto& candidate : {key, "disc:" + key, "pred:" + key})
        if (auto it = catalog.source_classes.find(candidate); it != catalog.source_classes.end()) return it->second;
      return unknown();
    case Dimension::OperationClasses:
      if (auto it = catalog.operation_classes.find(key); it != catalog.operation_classes.end()) return it->second;
      return unknown();
  }
  return unknown();
}

std::set<NodeId> resolve_selector(const Catalog& catalog, std::string_view selector) {
  const auto colon = selector.find(':');
  if (colon == std::string_view::npos)
    throw Error(ErrorCode::UnknownClass, "selector must look like dimension:key, got " + std::string(selector));
  const auto dimension = parse_dimension(selector.substr(0, colon));
  if (!dimension) throw Error(ErrorCode::UnknownClass, "unknown dimension in " + std::string(selector));
  return class_members(catalog, *dimension, std::string(selector.substr(colon + 1)));
}

nlohmann::json to_json(const Catalog& catalog) {
  return {{"agents", catalog.agents},
          {"sources", catalog.source_entities},
          {"source_classes", catalog.source_classes},
          {"operation_classes", catalog.operation_classes}};
}

}  // namespace provex
