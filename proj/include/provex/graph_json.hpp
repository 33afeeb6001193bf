#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "provex/error.hpp"
#include "provex/graph.hpp"

namespace provex {

nlohmann::json to_json(const ProvNode& node);
nlohmann::json to_json(const ProvEdge& edge);
nlohmann::json to_json(const Appraisal& appraisal);
nlohmann::json to_json(const ProvGraph& graph);
nlohmann::json to_json(const Violation& violation);

// Throws Parse on a malformed element.
Appraisal appraisal_from_json(const nlohmann::json& json);
std::vector<Appraisal> appraisals_from_json(const nlohmann::json& json);

// Structural parse only; the result may violate graph invariants.
ProvGraph graph_from_json_unchecked(const nlohmann::json& json);

// Thrown by the validating loaders; carries the full violation list.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Parses and validates. Throws Parse or ValidationError.
ProvGraph graph_from_json(const nlohmann::json& json);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& json);

}  // namespace provex
