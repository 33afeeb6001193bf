#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "provex/analysis.hpp"
#include "provex/dynamics.hpp"
#include "provex/error.hpp"

namespace httplib {
class Server;
}

namespace provex {

struct ServiceOptions {
  std::size_t max_nodes = 5000;  // larger graphs are refused with 413
  std::size_t plan_limit = 8;    // plans requested per POST /graphs/{id}/plan
  std::size_t label_cap = kDefaultLabelCap;
};

// A failure with no library error code: unknown graph or session ids,
// oversized graphs.
class HttpError : public std::runtime_error {
 public:
  HttpError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}
  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }

 private:
  int status_;
  std::string code_;
};

// HTTP status for a library error code.
int http_status(ErrorCode code);

// Turns a refutation body into node ids. Items are node id strings or
// {"dimension": ..., "key": ...} selectors; a bare array or {"refuted": [...]}
// is accepted. Throws UnknownNode, UnknownClass (unknown or empty class) and
// Parse.
std::set<NodeId> resolve_refutations(const Analysis& analysis, const nlohmann::json& body);

// Graph registry and sessions behind the HTTP routes. Graphs are immutable
// snapshots; a plan merge swaps in a new snapshot under the same id. Each
// session owns an overlay guarded by its own mutex.
class Service {
 public:
  explicit Service(ServiceOptions options = {});

  // Throws HttpError(413) when the graph exceeds max_nodes.
  std::string add_graph(ProvGraph graph);
  std::shared_ptr<const Analysis> graph(const std::string& id) const;  // throws HttpError(404)

  // Registers every route on `server`. The service must outlive it.
  void bind(httplib::Server& server);

  const ServiceOptions& options() const { return options_; }

 private:
  struct Session {
    std::string id;
    std::string graph_id;
    std::string created;
    std::mutex mutex;
    Overlay overlay;
  };

  std::shared_ptr<Session> session(const std::string& id) const;
  nlohmann::json session_state(Session& session) const;  // caller holds session.mutex

  ServiceOptions options_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const Analysis>> graphs_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::size_t next_graph_ = 1;
  std::size_t next_session_ = 1;
};

}  // namespace provex
