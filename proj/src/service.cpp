#include "provex/service.hpp"

#include <ctime>
#include <iomanip>
#include <sstream>

#include <httplib.h>

#include "provex/catalog.hpp"
#include "provex/error.hpp"
#include "provex/explain.hpp"
#include "provex/graph_json.hpp"
#include "provex/htn/planner.hpp"
#include "provex/mapping.hpp"

namespace provex {

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, {{"error", code}, {"message", message}});
}

// Runs a handler and maps exceptions to JSON error responses.
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const HttpError& e) {
      send_error(res, e.status(), e.code(), e.what());
    } catch (const ValidationError& e) {
      json body = {{"error", to_string(e.code())}, {"message", e.what()}, {"violations", json::array()}};
      for (const auto& v : e.violations()) body["violations"].push_back(to_json(v));
      send_json(res, 422, body);
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), to_string(e.code()), e.what());
    } catch (const json::exception& e) {
      send_error(res, 422, "Parse", e.what());
    }
  };
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) throw HttpError(422, "Parse", "request body is empty");
  return json::parse(req.body);
}

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

// Adds `extra` to a copy of `base`. Shared node ids must carry identical nodes.
ProvGraph merge_graphs(const ProvGraph& base, const ProvGraph& extra) {
  ProvGraph out = base;
  for (const auto& node : extra.nodes()) {
    if (const auto* existing = out.find(node.id)) {
      if (!(*existing == node)) throw Error(ErrorCode::DuplicateId, "conflicting definitions of node " + node.id);
      continue;
    }
    out.add_node(node);
  }
  for (const auto& edge : extra.edges()) out.add_edge(edge);
  for (const auto& appraisal : extra.appraisals()) out.add_appraisal(appraisal);
  return out;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownNode:
    case ErrorCode::UnknownSource: return 404;
    case ErrorCode::UnknownClass:
    case ErrorCode::DuplicateId:
    case ErrorCode::OverflowUnsound: return 409;
    default: return 422;
  }
}

std::set<NodeId> resolve_refutations(const Analysis& analysis, const json& body) {
  const json& items = body.is_object() && body.contains("refuted") ? body.at("refuted") : body;
  if (!items.is_array()) throw Error(ErrorCode::Parse, "expected an array of node ids or class selectors");
  std::set<NodeId> out;
  for (const auto& item : items) {
    if (item.is_string()) {
      out.insert(analysis.graph().node(item.get<std::string>()).id);
    } else if (item.is_object() && item.contains("dimension") && item.contains("key")) {
      const auto text = item.at("dimension").get<std::string>();
      const auto dimension = parse_dimension(text);
      if (!dimension) throw Error(ErrorCode::Parse, "unknown dimension " + text);
      const auto members = class_members(analysis.catalog(), *dimension, item.at("key").get<std::string>());
      if (members.empty()) throw Error(ErrorCode::UnknownClass, "selector resolves to no nodes");
      out.insert(members.begin(), members.end());
    } else {
      throw Error(ErrorCode::Parse, "refutation items are node ids or {dimension, key} objects");
    }
  }
  return out;
}

Service::Service(ServiceOptions options) : options_(options) {}

std::string Service::add_graph(ProvGraph graph) {
  if (graph.node_count() > options_.max_nodes)
    throw HttpError(413, "TooLarge",
                    "graph has " + std::to_string(graph.node_count()) + " nodes; the limit is " +
                        std::to_string(options_.max_nodes));
  auto analysis = std::make_shared<const Analysis>(std::make_shared<const ProvGraph>(std::move(graph)),
                                                   options_.label_cap);
  std::unique_lock lock(mutex_);
  auto id = "g" + std::to_string(next_graph_++);
  graphs_.emplace(id, std::move(analysis));
  return id;
}

std::shared_ptr<const Analysis> Service::graph(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = graphs_.find(id);
  if (it == graphs_.end()) throw HttpError(404, "UnknownGraph", "no graph " + id);
  return it->second;
}

std::shared_ptr<Service::Session> Service::session(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw HttpError(404, "UnknownSession", "no session " + id);
  return it->second;
}

json Service::session_state(Session& s) const {
  const auto analysis = graph(s.graph_id);
  auto body = state_to_json(*analysis, analysis->evaluate(s.overlay));
  body["graph_id"] = s.graph_id;
  body["refuted"] = s.overlay.refuted;
  body["confidence_overrides"] = s.overlay.confidence_overrides;
  return body;
}

void Service::bind(httplib::Server& server) {
  server.Post("/graphs", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto graph = graph_from_json(parse_body(req));
    const auto nodes = graph.node_count();
    const auto edges = graph.edges().size();
    send_json(res, 201, {{"graph_id", add_graph(std::move(graph))}, {"nodes", nodes}, {"edges", edges}});
  }));

  server.Post(R"(/graphs/([^/]+)/plan)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    graph(id);
    const auto body = parse_body(req);
    const auto domain = htn::load_domain(body.at("domain"));
    const auto problem = htn::load_problem(body.at("problem"));
    const auto appraisals =
        body.contains("appraisals") ? appraisals_from_json(body.at("appraisals")) : std::vector<Appraisal>{};
    const auto limit = body.value("all_plans", options_.plan_limit);
    const auto plans = htn::all_plans(domain, problem, limit);
    if (plans.empty()) throw Error(ErrorCode::Unsolvable, "no plan achieves the problem's tasks");
    const auto mapped = plan_to_prov(plans, problem, appraisals);

    std::unique_lock lock(mutex_);
    auto it = graphs_.find(id);
    if (it == graphs_.end()) throw HttpError(404, "UnknownGraph", "no graph " + id);
    auto graph = merge_graphs(it->second->graph(), mapped.graph);
    if (graph.node_count() > options_.max_nodes)
      throw HttpError(413, "TooLarge", "merged graph exceeds " + std::to_string(options_.max_nodes) + " nodes");
    const auto nodes = graph.node_count();
    it->second = std::make_shared<const Analysis>(std::make_shared<const ProvGraph>(std::move(graph)),
                                                  options_.label_cap);
    send_json(res, 200, {{"graph_id", id}, {"plans", plans.size()}, {"nodes", nodes}, {"report", to_json(mapped.report)}});
  }));

  server.Get(R"(/graphs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, to_json(graph(req.matches[1])->graph()));
  }));

  server.Get(R"(/graphs/([^/]+)/catalog)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, to_json(graph(req.matches[1])->catalog()));
  }));

  server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    const auto graph_id = body.at("graph_id").get<std::string>();
    graph(graph_id);
    auto s = std::make_shared<Session>();
    s->graph_id = graph_id;
    s->created = now_utc();
    {
      std::unique_lock lock(mutex_);
      s->id = "s" + std::to_string(next_session_++);
      sessions_.emplace(s->id, s);
    }
    send_json(res, 201, {{"session_id", s->id}, {"graph_id", graph_id}, {"created", s->created}});
  }));

  server.Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto s = session(req.matches[1]);
    std::lock_guard lock(s->mutex);
    send_json(res, 200,
              {{"session_id", s->id},
               {"graph_id", s->graph_id},
               {"created", s->created},
               {"refuted", s->overlay.refuted},
               {"confidence_overrides", s->overlay.confidence_overrides}});
  }));

  server.Delete(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    std::unique_lock lock(mutex_);
    if (sessions_.erase(req.matches[1]) == 0)
      throw HttpError(404, "UnknownSession", "no session " + std::string(req.matches[1]));
    res.status = 204;
  }));

  server.Put(R"(/sessions/([^/]+)/refuted)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto s = session(req.matches[1]);
    const auto body = parse_body(req);
    std::lock_guard lock(s->mutex);
    s->overlay.refuted = resolve_refutations(*graph(s->graph_id), body);
    send_json(res, 200, session_state(*s));
  }));

  server.Put(R"(/sessions/([^/]+)/appraisals)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto s = session(req.matches[1]);
    const auto body = parse_body(req);
    if (!body.is_object()) throw Error(ErrorCode::Parse, "expected an object of subject -> confidence");
    Overlay next;
    for (const auto& [subject, value] : body.items()) {
      if (value.is_null()) continue;
      if (!value.is_number()) throw Error(ErrorCode::Parse, "confidence of " + subject + " is not a number");
      next.confidence_overrides[subject] = value.get<double>();
    }
    std::lock_guard lock(s->mutex);
    next.refuted = s->overlay.refuted;
    check_overlay(graph(s->graph_id)->graph(), next);
    s->overlay = std::move(next);
    send_json(res, 200, session_state(*s));
  }));

  server.Get(R"(/sessions/([^/]+)/state)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto s = session(req.matches[1]);
    std::lock_guard lock(s->mutex);
    send_json(res, 200, session_state(*s));
  }));

  server.Get(R"(/sessions/([^/]+)/explain)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto s = session(req.matches[1]);
    if (!req.has_param("kind")) throw Error(ErrorCode::InvalidArgument, "missing kind parameter");
    const auto kind_text = req.get_param_value("kind");
    const auto kind = parse_question_kind(kind_text);
    if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown question kind " + kind_text);
    Question question{*kind, {}, 0.0};
    for (std::size_t i = 0; i < req.get_param_value_count("focus"); ++i)
      question.focus.push_back(req.get_param_value("focus", i));
    if (req.has_param("threshold")) {
      const auto text = req.get_param_value("threshold");
      std::size_t used = 0;
      try {
        question.threshold = std::stod(text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != text.size()) throw Error(ErrorCode::InvalidArgument, "threshold is not a number");
    }
    std::lock_guard lock(s->mutex);
    const auto analysis = graph(s->graph_id);
    send_json(res, 200, to_json(answer(*analysis, s->overlay, question)));
  }));
}

}  // namespace provex
