#pragma once

#include <memory>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "provex/service.hpp"

namespace provex::testing {

// A Service listening on an ephemeral loopback port for the lifetime of the
// object, plus a client pointed at it.
class ServerHarness {
 public:
  explicit ServerHarness(ServiceOptions options = {}) : service_(options) {
    service_.bind(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw std::runtime_error("could not bind a loopback port");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(30, 0);
  }
  ~ServerHarness() {
    server_.stop();
    thread_.join();
  }
  ServerHarness(const ServerHarness&) = delete;
  ServerHarness& operator=(const ServerHarness&) = delete;

  Service& service() { return service_; }
  httplib::Client& client() { return *client_; }
  int port() const { return port_; }

 private:
  Service service_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace provex::testing
