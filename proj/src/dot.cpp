#include "provex/dot.hpp"

#include <algorithm>
#include <sstream>

namespace provex {

namespace {

std::string quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string_view shape(NodeSubtype subtype) {
  switch (subtype) {
    case NodeSubtype::Belief: return "ellipse";
    case NodeSubtype::InformationSource: return "note";
    case NodeSubtype::Goal: return "doubleoctagon";
    case NodeSubtype::Task: return "box";
    case NodeSubtype::Actor: return "house";
  }
  return "ellipse";
}

std::string_view bucket(double confidence) {
  if (confidence >= 0.7) return "#8fd18f";
  if (confidence >= 0.3) return "#f6c56b";
  return "#f08080";
}

}  // namespace

std::string export_dot(const Analysis& analysis, const Overlay& overlay) {
  const auto& graph = analysis.graph();
  const auto state = analysis.evaluate(overlay);

  std::vector<NodeIndex> nodes(graph.node_count());
  for (NodeIndex i = 0; i < nodes.size(); ++i) nodes[i] = i;
  std::sort(nodes.begin(), nodes.end(), [&](NodeIndex a, NodeIndex b) { return graph.node(a).id < graph.node(b).id; });
  std::vector<ProvEdge> edges = graph.edges();
  std::sort(edges.begin(), edges.end());

  std::ostringstream out;
  out << "digraph provenance {\n  rankdir=LR;\n  node [fontname=\"Helvetica\"];\n";
  for (NodeIndex i : nodes) {
    const auto& node = graph.node(i);
    out << "  " << quote(node.id) << " [label=" << quote(node.label.empty() ? node.id : node.label)
        << ", shape=" << shape(node.subtype);
    if (state.status[i] == Status::In) {
      out << ", style=filled, fillcolor=\"" << bucket(*state.confidence[i]) << "\"";
    } else {
      out << ", style=dashed, color=gray50, fontcolor=gray50";
    }
    out << ", tooltip=" << quote(std::string(to_string(state.status[i])));
    out << "];\n";
  }
  for (const auto& edge : edges)
    out << "  " << quote(edge.to) << " -> " << quote(edge.from) << " [label=" << quote(std::string(to_string(edge.relation)))
        << ", dir=back];\n";
  out << "}\n";
  return out.str();
}

}  // namespace provex
