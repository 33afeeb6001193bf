#include "provex/explain.hpp"

#include <algorithm>

#include "provex/error.hpp"

namespace provex {

namespace {

using nlohmann::json;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json id_list(const std::set<NodeId>& ids) { return json(std::vector<NodeId>(ids.begin(), ids.end())); }

// Every node m depends on, through any alternative.
std::vector<char> upstream(const SupportModel& model, NodeIndex start) {
  std::vector<char> seen(model.size(), 0);
  std::vector<NodeIndex> work{start};
  seen[start] = 1;
  while (!work.empty()) {
    const NodeIndex node = work.back();
    work.pop_back();
    for (const auto& alt : model.alternatives[node])
      for (NodeIndex m : alt)
        if (!seen[m]) {
          seen[m] = 1;
          work.push_back(m);
        }
  }
  return seen;
}

std::vector<char> downstream(const SupportModel& model, NodeIndex start) {
  std::vector<char> seen(model.size(), 0);
  std::vector<NodeIndex> work{start};
  seen[start] = 1;
  while (!work.empty()) {
    const NodeIndex node = work.back();
    work.pop_back();
    for (NodeIndex d : model.dependents[node])
      if (!seen[d]) {
        seen[d] = 1;
        work.push_back(d);
      }
  }
  return seen;
}

std::optional<double> alternative_value(const std::vector<NodeIndex>& alt, const Analysis::State& state) {
  double weakest = 1.0;
  for (NodeIndex m : alt) {
    if (state.status[m] != Status::In) return std::nullopt;
    weakest = std::min(weakest, *state.confidence[m]);
  }
  return weakest;
}

// Index of the first alternative with the highest value, if any is live.
std::optional<std::size_t> best_alternative(const SupportModel& model, NodeIndex node, const Analysis::State& state) {
  std::optional<std::size_t> best;
  double best_value = -1.0;
  const auto& alts = model.alternatives[node];
  for (std::size_t k = 0; k < alts.size(); ++k) {
    const auto value = alternative_value(alts[k], state);
    if (value && *value > best_value) {
      best = k;
      best_value = *value;
    }
  }
  return best;
}

std::set<NodeId> checked_focus(const Analysis& analysis, const std::set<NodeId>& focus) {
  if (focus.empty()) throw Error(ErrorCode::InvalidArgument, "focus must name at least one node");
  for (const auto& id : focus) analysis.index(id);
  return focus;
}

std::map<NodeId, ConfidenceDelta> deltas(const Analysis& analysis, const std::set<NodeId>& nodes,
                                         const Analysis::State& before, const Analysis::State& after) {
  std::map<NodeId, ConfidenceDelta> out;
  for (const auto& id : nodes) {
    const NodeIndex i = analysis.index(id);
    out.emplace(id, ConfidenceDelta{before.confidence[i], after.confidence[i]});
  }
  return out;
}

}  // namespace

std::string_view to_string(QuestionKind kind) {
  switch (kind) {
    case QuestionKind::Why: return "why";
    case QuestionKind::Reliability: return "reliability";
    case QuestionKind::Sensitivity: return "sensitivity";
    case QuestionKind::Assumptions: return "assumptions";
    case QuestionKind::Replan: return "replan";
    case QuestionKind::Impact: return "impact";
    case QuestionKind::Pertinence: return "pertinence";
  }
  return "why";
}

std::optional<QuestionKind> parse_question_kind(std::string_view text) {
  for (auto kind : {QuestionKind::Why, QuestionKind::Reliability, QuestionKind::Sensitivity, QuestionKind::Assumptions,
                    QuestionKind::Replan, QuestionKind::Impact, QuestionKind::Pertinence})
    if (to_string(kind) == text) return kind;
  return std::nullopt;
}

json to_json(const Explanation& e) {
  json out = {{"kind", to_string(e.kind)},
              {"focus", e.focus},
              {"emphasized", id_list(e.emphasized)},
              {"impacted", id_list(e.impacted)}};
  json d = json::object();
  for (const auto& [id, delta] : e.confidence_deltas)
    d[id] = {{"before", optional_number(delta.before)}, {"after", optional_number(delta.after)}};
  out["confidence_deltas"] = std::move(d);
  if (e.necessary) out["necessary_set"] = id_list(*e.necessary);
  if (e.sufficient) {
    json sets = json::array();
    for (const auto& env : *e.sufficient) sets.push_back(id_list(env));
    out["sufficient_sets"] = std::move(sets);
  }
  for (const auto& [key, value] : e.verdicts.items()) out[key] = value;
  return out;
}

Explanation why_action(const Analysis& analysis, const Overlay& overlay, const NodeId& activity) {
  const NodeIndex a = analysis.index(activity);
  if (analysis.graph().node(a).kind != NodeKind::Activity)
    throw Error(ErrorCode::NotAnActivity, activity + " is not an activity");
  const auto& model = analysis.model();
  const auto before = analysis.evaluate(overlay);
  Overlay refuted = overlay;
  refuted.refuted.insert(activity);
  const auto after = analysis.evaluate(refuted);

  Explanation e;
  e.kind = QuestionKind::Why;
  e.focus = {activity};
  e.emphasized = pertinence(analysis.graph(), model, before.status, {activity});
  e.impacted = impact(analysis.graph(), model, overlay, {activity});
  e.confidence_deltas = deltas(analysis, e.impacted, before, after);

  std::vector<NodeId> goals;
  const auto reach = downstream(model, a);
  for (NodeIndex s : model.sinks)
    if (reach[s] && analysis.graph().node(s).kind == NodeKind::Entity) goals.push_back(analysis.graph().node(s).id);
  const bool supported = before.status[a] == Status::In;
  e.verdicts = {{"status", to_string(before.status[a])},
                {"supported", supported},
                {"verdict", supported ? "supported" : "unsupported under current overlay"},
                {"confidence", optional_number(before.confidence[a])},
                {"goals", goals}};
  return e;
}

Explanation reliability(const Analysis& analysis, const Overlay& overlay, const NodeId& m) {
  const NodeIndex node = analysis.index(m);
  const auto& model = analysis.model();
  const auto state = analysis.evaluate(overlay);

  Explanation e;
  e.kind = QuestionKind::Reliability;
  e.focus = {m};

  json alternatives = json::array();
  for (const auto& alt : model.alternatives[node]) {
    std::set<NodeId> members;
    for (NodeIndex k : alt) members.insert(analysis.graph().node(k).id);
    alternatives.push_back({{"members", id_list(members)}, {"confidence", optional_number(alternative_value(alt, state))}});
  }

  // Follow the best alternative of every node on the way up.
  json best = nullptr;
  if (state.status[node] == Status::In) {
    std::vector<NodeIndex> work{node};
    std::vector<char> seen(model.size(), 0);
    seen[node] = 1;
    while (!work.empty()) {
      const NodeIndex current = work.back();
      work.pop_back();
      e.emphasized.insert(analysis.graph().node(current).id);
      const auto k = best_alternative(model, current, state);
      if (!k) continue;
      if (current == node) best = alternatives[*k]["members"];
      for (NodeIndex member : model.alternatives[current][*k])
        if (!seen[member]) {
          seen[member] = 1;
          work.push_back(member);
        }
    }
  }
  std::vector<NodeId> agents;
  for (const auto& id : e.emphasized)
    if (analysis.graph().node(id).kind == NodeKind::Agent) agents.push_back(id);

  e.verdicts = {{"status", to_string(state.status[node])},
                {"confidence", optional_number(state.confidence[node])},
                {"best_alternative", best},
                {"via_agents", agents},
                {"alternatives", alternatives}};
  return e;
}

Explanation sensitivity(const Analysis& analysis, const Overlay& overlay, const NodeId& m) {
  const NodeIndex node = analysis.index(m);
  const auto& model = analysis.model();
  const auto& refuted = overlay.refuted;
  const bool roots_only = std::all_of(refuted.begin(), refuted.end(), [&](const NodeId& id) {
    const auto i = analysis.graph().index_of(id);
    return i && model.is_root(*i);
  });

  Explanation e;
  e.kind = QuestionKind::Sensitivity;
  e.focus = {m};
  bool necessary = false;
  std::string method = "fixpoint";
  if (roots_only && !analysis.labels().overflow(m)) {
    method = "labels";
    necessary = is_necessary(analysis.labels(), m, refuted);
    e.sufficient = contract(analysis.labels().label(m), refuted).environments;
  } else {
    necessary = analysis.evaluate(overlay).status[node] != Status::In;
  }
  e.verdicts = {{"necessary", necessary}, {"method", method}, {"refuted", id_list(refuted)}};
  return e;
}

Explanation assumptions_for(const Analysis& analysis, const NodeId& m) {
  analysis.index(m);
  const auto& labels = analysis.labels();
  Explanation e;
  e.kind = QuestionKind::Assumptions;
  e.focus = {m};
  e.necessary = necessary_assumptions(labels, m);
  e.sufficient = sufficient_sets(labels, m);

  std::set<NodeId> mentioned = {m};
  for (const auto& env : *e.sufficient) mentioned.insert(env.begin(), env.end());
  const auto strings = assumption_strings(analysis.graph(), mentioned);

  auto collect = [&](const std::set<NodeId>& nodes) {
    std::vector<std::string> out;
    for (const auto& id : nodes)
      if (auto it = strings.find(id); it != strings.end())
        for (const auto& s : it->second)
          if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    return out;
  };
  std::set<NodeId> necessary_nodes = *e.necessary;
  necessary_nodes.insert(m);
  json per_set = json::array();
  for (const auto& env : *e.sufficient) per_set.push_back(collect(env));

  e.verdicts = {{"necessary_assumptions", collect(necessary_nodes)},
                {"sufficient_assumptions", per_set},
                {"assumptions_by_node", strings}};
  return e;
}

Explanation replan_assessment(const Analysis& analysis, const Overlay& overlay, const NodeId& goal, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error(ErrorCode::InvalidArgument, "threshold must lie in [0,1]");
  const NodeIndex node = analysis.index(goal);
  const auto& model = analysis.model();
  if (analysis.graph().node(node).kind != NodeKind::Entity || !model.dependents[node].empty())
    throw Error(ErrorCode::NotAGoal, goal + " is not a goal (a sink entity)");

  Overlay baseline_overlay = overlay;
  baseline_overlay.refuted.clear();
  const auto baseline = analysis.evaluate(baseline_overlay);
  const auto state = analysis.evaluate(overlay);

  const auto up = upstream(model, node);
  std::set<NodeId> refuted, lost, degraded;
  for (NodeIndex i = 0; i < model.size(); ++i) {
    if (!up[i]) continue;
    const auto& id = analysis.graph().node(i).id;
    if (state.status[i] == Status::Refuted) {
      refuted.insert(id);
    } else if (baseline.status[i] == Status::In && state.status[i] != Status::In) {
      lost.insert(id);
    } else if (state.status[i] == Status::In && *state.confidence[i] < *baseline.confidence[i]) {
      degraded.insert(id);
    }
  }

  Explanation e;
  e.kind = QuestionKind::Replan;
  e.focus = {goal};
  e.impacted = lost;
  e.impacted.insert(degraded.begin(), degraded.end());
  e.confidence_deltas = deltas(analysis, degraded, baseline, state);
  const bool supported = state.status[node] == Status::In;
  const bool needs_replan = !supported || *state.confidence[node] < threshold;
  e.verdicts = {{"needs_replan", needs_replan},
                {"supported", supported},
                {"confidence", optional_number(state.confidence[node])},
                {"baseline_confidence", optional_number(baseline.confidence[node])},
                {"threshold", threshold},
                {"refuted", id_list(refuted)},
                {"lost_support", id_list(lost)},
                {"degraded", id_list(degraded)}};
  return e;
}

Explanation impact_of(const Analysis& analysis, const Overlay& overlay, const std::set<NodeId>& focus) {
  checked_focus(analysis, focus);
  Overlay after_overlay = overlay;
  after_overlay.refuted.insert(focus.begin(), focus.end());
  Explanation e;
  e.kind = QuestionKind::Impact;
  e.focus.assign(focus.begin(), focus.end());
  e.impacted = impact(analysis.graph(), analysis.model(), overlay, focus);
  e.confidence_deltas = deltas(analysis, e.impacted, analysis.evaluate(overlay), analysis.evaluate(after_overlay));
  return e;
}

Explanation pertinence_of(const Analysis& analysis, const Overlay& overlay, const std::set<NodeId>& focus) {
  checked_focus(analysis, focus);
  Explanation e;
  e.kind = QuestionKind::Pertinence;
  e.focus.assign(focus.begin(), focus.end());
  e.emphasized = pertinence(analysis.graph(), analysis.model(), analysis.evaluate(overlay).status, focus);
  return e;
}

Explanation answer(const Analysis& analysis, const Overlay& overlay, const Question& question) {
  const std::set<NodeId> focus(question.focus.begin(), question.focus.end());
  auto single = [&]() -> const NodeId& {
    if (focus.size() != 1)
      throw Error(ErrorCode::InvalidArgument,
                  std::string(to_string(question.kind)) + " takes exactly one focus node");
    return *focus.begin();
  };
  switch (question.kind) {
    case QuestionKind::Why: return why_action(analysis, overlay, single());
    case QuestionKind::Reliability: return reliability(analysis, overlay, single());
    case QuestionKind::Sensitivity: return sensitivity(analysis, overlay, single());
    case QuestionKind::Assumptions: return assumptions_for(analysis, single());
    case QuestionKind::Replan: return replan_assessment(analysis, overlay, single(), question.threshold);
    case QuestionKind::Impact: return impact_of(analysis, overlay, focus);
    case QuestionKind::Pertinence: return pertinence_of(analysis, overlay, focus);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown question kind");
}

}  // namespace provex
