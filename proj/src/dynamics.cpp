#include "provex/dynamics.hpp"

#include <algorithm>

#include "provex/error.hpp"

namespace provex {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::In: return "IN";
    case Status::Out: return "OUT";
    case Status::Refuted: return "REFUTED";
  }
  return "OUT";
}

void check_overlay(const ProvGraph& graph, const Overlay& overlay) {
  for (const auto& id : overlay.refuted)
    if (!graph.contains(id)) throw Error(ErrorCode::UnknownNode, "unknown node " + id);
  for (const auto& [id, value] : overlay.confidence_overrides) {
    if (!graph.contains(id)) throw Error(ErrorCode::UnknownNode, "unknown node " + id);
    if (!(value >= 0.0 && value <= 1.0)) throw Error(ErrorCode::InvalidArgument, "confidence outside [0,1] for " + id);
  }
}

StatusVector support_fixpoint(const ProvGraph& graph, const SupportModel& model, const Overlay& overlay) {
  StatusVector status(model.size(), Status::Out);
  std::vector<char> refuted(model.size(), 0);
  for (const auto& id : overlay.refuted)
    if (auto i = graph.index_of(id)) refuted[*i] = 1;

  for (NodeIndex node : model.order) {
    if (refuted[node]) {
      status[node] = Status::Refuted;
      continue;
    }
    if (model.is_root(node)) {
      status[node] = Status::In;
      continue;
    }
    for (const auto& alt : model.alternatives[node]) {
      if (std::all_of(alt.begin(), alt.end(), [&](NodeIndex m) { return status[m] == Status::In; })) {
        status[node] = Status::In;
        break;
      }
    }
  }
  return status;
}

ConfidenceVector propagate_confidence(const ProvGraph& graph, const SupportModel& model, const Overlay& overlay,
                                      const StatusVector& status) {
  const std::size_t n = model.size();
  std::vector<std::optional<double>> own(n);
  // Last appraisal with a confidence wins; overrides beat appraisals.
  for (const auto& appraisal : graph.appraisals())
    if (appraisal.confidence)
      if (auto i = graph.index_of(appraisal.subject)) own[*i] = *appraisal.confidence;
  for (const auto& [id, value] : overlay.confidence_overrides)
    if (auto i = graph.index_of(id)) own[*i] = value;

  ConfidenceVector confidence(n);
  for (NodeIndex node : model.order) {
    if (status[node] != Status::In) continue;
    if (model.is_root(node)) {
      confidence[node] = own[node].value_or(1.0);
      continue;
    }
    double best = 0.0;
    for (const auto& alt : model.alternatives[node]) {
      double weakest = 1.0;
      bool live = true;
      for (NodeIndex m : alt) {
        if (status[m] != Status::In) {
          live = false;
          break;
        }
        weakest = std::min(weakest, *confidence[m]);
      }
      if (live) best = std::max(best, weakest);
    }
    if (own[node]) best = std::min(best, *own[node]);
    confidence[node] = best;
  }
  return confidence;
}

std::set<NodeId> impact(const ProvGraph& graph, const SupportModel& model, const Overlay& overlay,
                        const std::set<NodeId>& focus) {
  Overlay after = overlay;
  after.refuted.insert(focus.begin(), focus.end());
  const auto before_status = support_fixpoint(graph, model, overlay);
  const auto after_status = support_fixpoint(graph, model, after);
  const auto before_conf = propagate_confidence(graph, model, overlay, before_status);
  const auto after_conf = propagate_confidence(graph, model, after, after_status);

  std::set<NodeId> out;
  for (NodeIndex i = 0; i < model.size(); ++i) {
    const auto& id = graph.node(i).id;
    if (focus.contains(id) || before_status[i] != Status::In) continue;
    if (after_status[i] != Status::In || *after_conf[i] < *before_conf[i]) out.insert(id);
  }
  return out;
}

std::set<NodeId> pertinence(const ProvGraph& graph, const SupportModel& model, const StatusVector& status,
                            const std::set<NodeId>& focus) {
  std::vector<char> seen(model.size(), 0);
  std::vector<NodeIndex> work;
  for (const auto& id : focus) {
    const auto i = graph.index_of(id);
    if (!i) throw Error(ErrorCode::UnknownNode, "unknown node " + id);
    if (!seen[*i]) {
      seen[*i] = 1;
      work.push_back(*i);
    }
  }
  while (!work.empty()) {
    const NodeIndex node = work.back();
    work.pop_back();
    for (const auto& alt : model.alternatives[node]) {
      if (!std::all_of(alt.begin(), alt.end(), [&](NodeIndex m) { return status[m] == Status::In; })) continue;
      for (NodeIndex m : alt)
        if (!seen[m]) {
          seen[m] = 1;
          work.push_back(m);
        }
    }
  }
  std::set<NodeId> out;
  for (NodeIndex i = 0; i < model.size(); ++i)
    if (seen[i]) out.insert(graph.node(i).id);
  return out;
}

std::map<NodeId, Status> support_fixpoint(const ProvGraph& graph, const Overlay& overlay) {
  const auto status = support_fixpoint(graph, build_support_model(graph), overlay);
  std::map<NodeId, Status> out;
  for (NodeIndex i = 0; i < status.size(); ++i) out.emplace(graph.node(i).id, status[i]);
  return out;
}

std::map<NodeId, double> propagate_confidence(const ProvGraph& graph, const Overlay& overlay) {
  const auto model = build_support_model(graph);
  const auto status = support_fixpoint(graph, model, overlay);
  const auto confidence = propagate_confidence(graph, model, overlay, status);
  std::map<NodeId, double> out;
  for (NodeIndex i = 0; i < confidence.size(); ++i)
    if (confidence[i]) out.emplace(graph.node(i).id, *confidence[i]);
  return out;
}

}  // namespace provex
