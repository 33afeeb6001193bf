#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "provex/analysis.hpp"

namespace provex {

enum class QuestionKind { Why, Reliability, Sensitivity, Assumptions, Replan, Impact, Pertinence };
std::string_view to_string(QuestionKind kind);
std::optional<QuestionKind> parse_question_kind(std::string_view text);

struct ConfidenceDelta {
  std::optional<double> before;
  std::optional<double> after;
  bool operator==(const ConfidenceDelta&) const = default;
};

struct Explanation {
  QuestionKind kind = QuestionKind::Why;
  std::vector<NodeId> focus;
  std::set<NodeId> emphasized;  // upstream support
  std::set<NodeId> impacted;    // downstream effects
  std::map<NodeId, ConfidenceDelta> confidence_deltas;
  std::optional<std::set<NodeId>> necessary;
  std::optional<std::vector<Environment>> sufficient;
  // Kind-specific verdicts and values, e.g. {"needs_replan": true}.
  nlohmann::json verdicts = nlohmann::json::object();
};

// Verdicts are written at the top level next to the common fields.
nlohmann::json to_json(const Explanation& explanation);

// Upstream support, downstream impact and the goals the activity serves.
// Throws NotAnActivity, UnknownNode.
Explanation why_action(const Analysis& analysis, const Overlay& overlay, const NodeId& activity);

// Confidence at m and the alternative that delivers it.
Explanation reliability(const Analysis& analysis, const Overlay& overlay, const NodeId& m);

// Is the overlay's refuted set necessary for m? Uses the labels when every
// refuted node is a root and m's label is complete, the fixpoint otherwise.
Explanation sensitivity(const Analysis& analysis, const Overlay& overlay, const NodeId& m);

// Necessary and sufficient root sets of m with their appraisal assumptions.
// Throws OverflowUnsound.
Explanation assumptions_for(const Analysis& analysis, const NodeId& m);

// needs_replan = goal not IN, or its confidence below threshold.
// Throws NotAGoal, InvalidArgument.
Explanation replan_assessment(const Analysis& analysis, const Overlay& overlay, const NodeId& goal, double threshold);

Explanation impact_of(const Analysis& analysis, const Overlay& overlay, const std::set<NodeId>& focus);
Explanation pertinence_of(const Analysis& analysis, const Overlay& overlay, const std::set<NodeId>& focus);

struct Question {
  QuestionKind kind = QuestionKind::Why;
  std::vector<NodeId> focus;
  double threshold = 0.0;
};

// Dispatches one question. Throws InvalidArgument when the focus count does
// not suit the kind.
Explanation answer(const Analysis& analysis, const Overlay& overlay, const Question& question);

}  // namespace provex
