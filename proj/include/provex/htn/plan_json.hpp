#pragma once

#include <vector>

#include <json.hpp>

#include "provex/htn/planner.hpp"

namespace provex::htn {

nlohmann::json to_json(const Establisher& establisher);
nlohmann::json to_json(const ActionInstance& action);
nlohmann::json to_json(const PlanTree& plan);
// {"plans": [...]}
nlohmann::json plans_to_json(const std::vector<PlanTree>& plans);

// Throws Error(Parse).
Establisher establisher_from_json(const nlohmann::json& json);
PlanTree plan_from_json(const nlohmann::json& json);
// Accepts {"plans": [...]}, a bare array, or a single plan object.
std::vector<PlanTree> plans_from_json(const nlohmann::json& json);

}  // namespace provex::htn
