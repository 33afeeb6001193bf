#include "support/parity.hpp"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <stdexcept>

#include <httplib.h>

#include "provex/graph_json.hpp"

namespace provex::testing {

namespace {

using nlohmann::json;

std::string shell_quote(const std::string& text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

std::string run(const std::string& command) {
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) throw std::runtime_error("cannot start " + command);
  std::string out;
  std::array<char, 4096> buffer;
  while (auto n = std::fread(buffer.data(), 1, buffer.size(), pipe)) out.append(buffer.data(), n);
  const int status = pclose(pipe);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    throw std::runtime_error("command failed (" + std::to_string(WEXITSTATUS(status)) + "): " + command);
  return out;
}

std::vector<std::string> strings(const json& query, const char* key) {
  return query.contains(key) ? query.at(key).get<std::vector<std::string>>() : std::vector<std::string>{};
}

json checked(const httplib::Result& r, const std::string& what) {
  if (!r) throw std::runtime_error(what + ": no response");
  if (r->status < 200 || r->status >= 300)
    throw std::runtime_error(what + ": HTTP " + std::to_string(r->status) + " " + r->body);
  return json::parse(r->body);
}

}  // namespace

std::filesystem::path golden_dir() { return PROVEX_GOLDEN_DIR; }
std::filesystem::path cli_path() { return PROVEX_CLI; }

std::vector<json> golden_queries() { return read_json_file(golden_dir() / "queries.json").get<std::vector<json>>(); }

json cli_answer(const std::filesystem::path& graph, const json& query) {
  std::string command = shell_quote(cli_path().string()) + " query --graph " + shell_quote(graph.string()) +
                        " --kind " + shell_quote(query.at("kind").get<std::string>());
  for (const auto& id : strings(query, "focus")) command += " --focus " + shell_quote(id);
  for (const auto& id : strings(query, "refute")) command += " --refute " + shell_quote(id);
  for (const auto& sel : strings(query, "refute_class")) command += " --refute-class " + shell_quote(sel);
  if (query.contains("set_confidence"))
    for (const auto& [id, value] : query.at("set_confidence").items())
      command += " --set-confidence " + shell_quote(id + "=" + value.dump());
  if (query.contains("threshold")) command += " --threshold " + query.at("threshold").dump();
  return json::parse(run(command));
}

json http_answer(httplib::Client& client, const std::string& graph_id, const json& query) {
  const auto session =
      checked(client.Post("/sessions", json{{"graph_id", graph_id}}.dump(), "application/json"), "POST /sessions")
          .at("session_id")
          .get<std::string>();
  const auto base = "/sessions/" + session;

  json refuted = json::array();
  for (const auto& id : strings(query, "refute")) refuted.push_back(id);
  for (const auto& sel : strings(query, "refute_class")) {
    const auto colon = sel.find(':');
    refuted.push_back({{"dimension", sel.substr(0, colon)}, {"key", sel.substr(colon + 1)}});
  }
  checked(client.Put(base + "/refuted", refuted.dump(), "application/json"), "PUT refuted");
  const json overrides = query.value("set_confidence", json::object());
  checked(client.Put(base + "/appraisals", overrides.dump(), "application/json"), "PUT appraisals");

  httplib::Params params{{"kind", query.at("kind").get<std::string>()}};
  for (const auto& id : strings(query, "focus")) params.emplace("focus", id);
  if (query.contains("threshold")) params.emplace("threshold", query.at("threshold").dump());
  auto answer = checked(client.Get(base + "/explain", params, httplib::Headers{}), "GET explain");
  client.Delete(base);
  return answer;
}

std::vector<ParityOutcome> run_parity(httplib::Client& client, const std::string& graph_id, bool update) {
  const auto graph = golden_dir() / "rover_graph.json";
  std::vector<ParityOutcome> out;
  for (const auto& query : golden_queries()) {
    ParityOutcome o;
    o.name = query.at("name").get<std::string>();
    const auto expected_path = golden_dir() / "expected" / (o.name + ".json");
    try {
      const auto cli = cli_answer(graph, query);
      const auto http = http_answer(client, graph_id, query);
      if (update) write_json_file(expected_path, cli);
      o.cli_equals_http = cli == http && cli.dump() == http.dump();
      o.matches_golden = std::filesystem::exists(expected_path) && read_json_file(expected_path) == cli;
      if (!o.cli_equals_http) o.detail = "cli " + cli.dump() + " vs http " + http.dump();
      else if (!o.matches_golden) o.detail = "differs from " + expected_path.string();
    } catch (const std::exception& e) {
      o.detail = e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace provex::testing
