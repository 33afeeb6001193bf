#include <doctest.h>

#include <atomic>
#include <thread>

#include "provex/graph_json.hpp"
#include "support/fixtures.hpp"
#include "support/server.hpp"

using namespace provex;
namespace rv = provex::testing::rover;
using nlohmann::json;

namespace {

const char* kJson = "application/json";

struct Reply {
  int status;
  json body;
  std::string raw;
};

Reply reply(const httplib::Result& r) {
  REQUIRE(r);
  Reply out{r->status, nullptr, r->body};
  if (!r->body.empty()) out.body = json::parse(r->body);
  return out;
}

Reply post(httplib::Client& c, const std::string& path, const json& body) {
  return reply(c.Post(path, body.dump(), kJson));
}
Reply put(httplib::Client& c, const std::string& path, const json& body) {
  return reply(c.Put(path, body.dump(), kJson));
}
Reply get(httplib::Client& c, const std::string& path, const httplib::Params& params = {}) {
  return reply(c.Get(path, params, httplib::Headers{}));
}

// Rover graph registered as g1 and one session on it.
struct Fixture {
  testing::ServerHarness harness;
  std::string graph_id;
  std::string session_id;

  Fixture() {
    graph_id = post(c(), "/graphs", to_json(testing::rover_graph_by_hand())).body.at("graph_id");
    session_id = new_session();
  }
  httplib::Client& c() { return harness.client(); }
  std::string new_session() { return post(c(), "/sessions", {{"graph_id", graph_id}}).body.at("session_id"); }
  std::string path(const std::string& session, const std::string& tail) { return "/sessions/" + session + tail; }
};

json node_state(const Reply& r, const NodeId& id) { return r.body.at("nodes").at(id); }

}  // namespace

TEST_CASE("graph routes") {
  Fixture f;
  CHECK(f.graph_id == "g1");

  const auto graph = get(f.c(), "/graphs/g1");
  CHECK(graph.status == 200);
  CHECK(graph_from_json(graph.body) == testing::rover_graph_by_hand());
  CHECK(get(f.c(), "/graphs/g9").status == 404);

  const auto catalog = get(f.c(), "/graphs/g1/catalog");
  CHECK(catalog.status == 200);
  CHECK(catalog.body.at("agents") == json{"flier1", "rover0"});
  CHECK(catalog.body.at("operation_classes").at("take_image").size() == 2);

  auto broken = to_json(testing::rover_graph_by_hand());
  auto edge = broken["edges"][0];
  edge["to"] = "ghost";
  broken["edges"].push_back(edge);
  const auto invalid = post(f.c(), "/graphs", broken);
  CHECK(invalid.status == 422);
  CHECK(invalid.body.at("violations").size() >= 1);

  const auto garbage = reply(f.c().Post("/graphs", "{not json", kJson));
  CHECK(garbage.status == 422);
  CHECK(garbage.body.at("error") == "Parse");
}

TEST_CASE("node cap returns 413") {
  testing::ServerHarness harness(ServiceOptions{.max_nodes = 10});
  CHECK(post(harness.client(), "/graphs", to_json(testing::rover_graph_by_hand())).status == 413);
  CHECK(post(harness.client(), "/graphs", to_json(ProvGraph{})).status == 201);
}

TEST_CASE("planning into a graph") {
  testing::ServerHarness harness;
  auto& c = harness.client();
  const std::string id = post(c, "/graphs", to_json(ProvGraph{})).body.at("graph_id");
  const auto dir = testing::data_dir() / "rover";
  json body = {{"domain", read_json_file(dir / "domain.json")},
               {"problem", read_json_file(dir / "problem.json")},
               {"appraisals", read_json_file(dir / "appraisals.json")}};
  const auto planned = post(c, "/graphs/" + id + "/plan", body);
  REQUIRE(planned.status == 200);
  CHECK(planned.body.at("plans") == 2);
  CHECK(planned.body.at("nodes") == 20);

  // Planning again merges onto identical nodes.
  CHECK(post(c, "/graphs/" + id + "/plan", body).body.at("nodes") == 20);

  const std::string s = post(c, "/sessions", {{"graph_id", id}}).body.at("session_id");
  const auto state = get(c, "/sessions/" + s + "/state");
  CHECK(node_state(state, rv::kGoal).at("confidence") == doctest::Approx(0.8));

  CHECK(post(c, "/graphs/" + id + "/plan", {{"problem", body["problem"]}}).status == 422);
  CHECK(post(c, "/graphs/g42/plan", body).status == 404);
}

TEST_CASE("refutation and appraisal overlays") {
  Fixture f;
  const auto s = f.session_id;

  auto r = put(f.c(), f.path(s, "/refuted"), json::array({{{"dimension", "agents"}, {"key", "flier1"}}}));
  REQUIRE(r.status == 200);
  CHECK(node_state(r, "flier1").at("status") == "REFUTED");
  CHECK(node_state(r, rv::kCommFlier).at("status") == "OUT");
  CHECK(node_state(r, rv::kCommFlier).at("confidence").is_null());
  CHECK(node_state(r, rv::kGoal).at("status") == "IN");
  CHECK(node_state(r, rv::kGoal).at("confidence") == doctest::Approx(0.2));
  CHECK(r.body.at("refuted") == json{"flier1"});

  // TerrainMap at 0.9 lifts the rover path only as far as the shared
  // elevation-derived visibility belief allows.
  r = put(f.c(), f.path(s, "/appraisals"), {{"TerrainMap", 0.9}});
  CHECK(node_state(r, rv::kGoal).at("confidence") == doctest::Approx(0.8));
  CHECK(node_state(r, rv::kClearRover).at("confidence") == doctest::Approx(0.9));
  r = put(f.c(), f.path(s, "/appraisals"), {{"TerrainMap", 0.9}, {"ElevationMap", 1.0}});
  CHECK(node_state(r, rv::kGoal).at("confidence") == doctest::Approx(0.9));

  r = put(f.c(), f.path(s, "/refuted"), json::array());
  for (const auto& [id, n] : r.body.at("nodes").items()) CHECK(n.at("status") == "IN");
  r = put(f.c(), f.path(s, "/appraisals"), json::object());
  CHECK(node_state(r, rv::kGoal).at("confidence") == doctest::Approx(0.8));

  r = put(f.c(), f.path(s, "/refuted"), {{"refuted", {{{"dimension", "op"}, {"key", "take_image"}}}}});
  CHECK(node_state(r, rv::kGoal).at("status") == "OUT");

  r = put(f.c(), f.path(s, "/refuted"), json::array({"TerrainMap", {{"dimension", "class"}, {"key", "GEOINT"}}}));
  CHECK(r.body.at("refuted") == json{"ElevationMap", "TerrainMap"});
}

TEST_CASE("overlay errors leave the session untouched") {
  Fixture f;
  const auto s = f.session_id;
  put(f.c(), f.path(s, "/refuted"), json::array({"flier1"}));
  const auto before = get(f.c(), f.path(s, "/state")).raw;

  CHECK(put(f.c(), f.path(s, "/refuted"), json::array({{{"dimension", "op"}, {"key", "fly"}}})).status == 409);
  CHECK(put(f.c(), f.path(s, "/refuted"), json::array({"ghost"})).status == 404);
  CHECK(put(f.c(), f.path(s, "/refuted"), json::array({{{"dimension", "planet"}, {"key", "x"}}})).status == 422);
  CHECK(put(f.c(), f.path(s, "/refuted"), json::array({42})).status == 422);
  CHECK(put(f.c(), f.path(s, "/refuted"), {{"nope", 1}}).status == 422);
  CHECK(reply(f.c().Put(f.path(s, "/refuted"), "[", kJson)).status == 422);
  CHECK(put(f.c(), f.path(s, "/appraisals"), {{"TerrainMap", 2.0}}).status == 422);
  CHECK(put(f.c(), f.path(s, "/appraisals"), {{"ghost", 0.5}}).status == 404);
  CHECK(put(f.c(), f.path(s, "/appraisals"), {{"TerrainMap", "high"}}).status == 422);
  CHECK(put(f.c(), "/sessions/s99/refuted", json::array()).status == 404);

  CHECK(get(f.c(), f.path(s, "/state")).raw == before);
}

TEST_CASE("explain route") {
  Fixture f;
  const auto s = f.session_id;
  put(f.c(), f.path(s, "/refuted"), json::array({"flier1"}));

  auto r = get(f.c(), f.path(s, "/explain"), {{"kind", "replan"}, {"focus", rv::kGoal}, {"threshold", "0.5"}});
  REQUIRE(r.status == 200);
  CHECK(r.body.at("kind") == "replan");
  CHECK(r.body.at("needs_replan") == true);
  CHECK(r.body.at("confidence") == doctest::Approx(0.2));

  r = get(f.c(), f.path(s, "/explain"), {{"kind", "impact"}, {"focus", "TerrainMap"}, {"focus", "ElevationMap"}});
  CHECK(r.status == 200);
  CHECK(r.body.at("focus").size() == 2);

  CHECK(get(f.c(), f.path(s, "/explain"), {{"focus", rv::kGoal}}).status == 422);
  CHECK(get(f.c(), f.path(s, "/explain"), {{"kind", "how"}, {"focus", rv::kGoal}}).status == 422);
  CHECK(get(f.c(), f.path(s, "/explain"), {{"kind", "why"}, {"focus", "ghost"}}).status == 404);
  CHECK(get(f.c(), f.path(s, "/explain"), {{"kind", "why"}, {"focus", rv::kGoal}}).status == 422);
  CHECK(get(f.c(), f.path(s, "/explain"), {{"kind", "replan"}, {"focus", rv::kGoal}, {"threshold", "abc"}}).status ==
        422);
  CHECK(get(f.c(), f.path(s, "/explain"), {{"kind", "replan"}, {"focus", rv::kGoal}, {"threshold", "3"}}).status ==
        422);
}

TEST_CASE("session lifecycle") {
  Fixture f;
  CHECK(post(f.c(), "/sessions", {{"graph_id", "g9"}}).status == 404);
  CHECK(post(f.c(), "/sessions", json::object()).status == 422);
  const auto info = get(f.c(), f.path(f.session_id, ""));
  CHECK(info.body.at("graph_id") == "g1");
  CHECK(info.body.contains("created"));
  CHECK(reply(f.c().Delete(f.path(f.session_id, ""))).status == 204);
  CHECK(get(f.c(), f.path(f.session_id, "/state")).status == 404);
  CHECK(reply(f.c().Delete(f.path(f.session_id, ""))).status == 404);
}

TEST_CASE("sessions are isolated under interleaved requests") {
  Fixture f;
  const auto a = f.session_id;
  const auto b = f.new_session();
  put(f.c(), f.path(a, "/refuted"), json::array({"flier1"}));
  put(f.c(), f.path(b, "/refuted"), json::array({"TerrainMap"}));
  put(f.c(), f.path(a, "/appraisals"), {{"ElevationMap", 0.5}});

  auto sa = get(f.c(), f.path(a, "/state"));
  auto sb = get(f.c(), f.path(b, "/state"));
  CHECK(sa.body.at("refuted") == json{"flier1"});
  CHECK(sb.body.at("refuted") == json{"TerrainMap"});
  CHECK(node_state(sa, rv::kGoal).at("confidence") == doctest::Approx(0.2));
  CHECK(node_state(sb, rv::kGoal).at("confidence") == doctest::Approx(0.8));
  CHECK(sb.body.at("confidence_overrides").empty());

  // Concurrent writers on distinct sessions, each checking its own reads.
  std::atomic<int> mismatches{0};
  auto worker = [&](std::string session, NodeId refute, double expected) {
    httplib::Client client("127.0.0.1", f.harness.port());
    for (int i = 0; i < 25; ++i) {
      auto r = client.Put(f.path(session, "/refuted"), json::array({refute}).dump(), kJson);
      auto s = client.Get(f.path(session, "/state"));
      if (!r || !s || json::parse(s->body)["nodes"][rv::kGoal]["confidence"].get<double>() != expected) ++mismatches;
      client.Put(f.path(session, "/refuted"), "[]", kJson);
    }
  };
  const auto c = f.new_session();
  const auto d = f.new_session();
  std::thread t1(worker, c, "flier1", 0.2);
  std::thread t2(worker, d, "TerrainMap", 0.8);
  t1.join();
  t2.join();
  CHECK(mismatches == 0);
  CHECK(get(f.c(), f.path(a, "/state")).raw == sa.raw);
}

TEST_CASE("identical overlays give byte-identical state") {
  Fixture f;
  const auto a = f.session_id;
  const auto b = f.new_session();
  for (const auto& s : {a, b}) {
    put(f.c(), f.path(s, "/refuted"), json::array({"rover0", {{"dimension", "source"}, {"key", "TerrainMap"}}}));
    put(f.c(), f.path(s, "/appraisals"), {{"ElevationMap", 0.65}});
  }
  const auto first = get(f.c(), f.path(a, "/state")).raw;
  CHECK(get(f.c(), f.path(b, "/state")).raw == first);
  CHECK(get(f.c(), f.path(a, "/state")).raw == first);
}
