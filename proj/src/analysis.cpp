#include "provex/analysis.hpp"

#include "provex/error.hpp"

namespace provex {

Analysis::Analysis(std::shared_ptr<const ProvGraph> graph, std::size_t label_cap)
    : graph_(std::move(graph)),
      model_(build_support_model(*graph_)),
      catalog_(build_catalog(*graph_)),
      label_cap_(label_cap) {}

const Labels& Analysis::labels() const {
  std::call_once(labels_once_, [&] { labels_ = std::make_unique<Labels>(compute_labels(*graph_, model_, label_cap_)); });
  return *labels_;
}

Analysis::State Analysis::evaluate(const Overlay& overlay) const {
  State state;
  state.status = support_fixpoint(*graph_, model_, overlay);
  state.confidence = propagate_confidence(*graph_, model_, overlay, state.status);
  return state;
}

NodeIndex Analysis::index(const NodeId& id) const {
  if (auto i = graph_->index_of(id)) return *i;
  throw Error(ErrorCode::UnknownNode, "unknown node " + id);
}

nlohmann::json state_to_json(const Analysis& analysis, const Analysis::State& state) {
  nlohmann::json nodes = nlohmann::json::object();
  for (NodeIndex i = 0; i < state.status.size(); ++i) {
    const auto& c = state.confidence[i];
    nodes[analysis.graph().node(i).id] = {{"status", to_string(state.status[i])},
                                          {"confidence", c ? nlohmann::json(*c) : nlohmann::json(nullptr)}};
  }
  return {{"nodes", std::move(nodes)}};
}

}  // namespace provex
