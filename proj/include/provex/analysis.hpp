#pragma once

#include <memory>
#include <mutex>

#include "provex/catalog.hpp"
#include "provex/dynamics.hpp"
#include "provex/environments.hpp"
#include "provex/graph.hpp"
#include "provex/support.hpp"

namespace provex {

// Everything derived from one immutable graph: the support model and the
// catalog up front, the labels on first use. Safe to share across threads.
class Analysis {
 public:
  // Throws CyclicSupport.
  explicit Analysis(std::shared_ptr<const ProvGraph> graph, std::size_t label_cap = kDefaultLabelCap);

  const ProvGraph& graph() const { return *graph_; }
  std::shared_ptr<const ProvGraph> graph_ptr() const { return graph_; }
  const SupportModel& model() const { return model_; }
  const Catalog& catalog() const { return catalog_; }
  const Labels& labels() const;

  // Status and confidence of every node under an overlay.
  struct State {
    StatusVector status;
    ConfidenceVector confidence;
  };
  State evaluate(const Overlay& overlay) const;

  NodeIndex index(const NodeId& id) const;  // throws UnknownNode

 private:
  std::shared_ptr<const ProvGraph> graph_;
  SupportModel model_;
  Catalog catalog_;
  std::size_t label_cap_;
  mutable std::once_flag labels_once_;
  mutable std::unique_ptr<Labels> labels_;
};

// {"nodes": {"id": {"status": "IN", "confidence": 0.8}, ...}} in id order;
// confidence is null for nodes that are not IN.
nlohmann::json state_to_json(const Analysis& analysis, const Analysis::State& state);

}  // namespace provex
