#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "trackx/command.hpp"
#include "trackx/model.hpp"

namespace trackx {

// Sessions addressed by id. Each session has a single writer at a time;
// readers take an immutable snapshot and never see a half-applied command.
class SessionStore {
 public:
  std::string create(Session session);
  bool erase(const std::string& id);
  std::vector<std::string> ids() const;

  // Throws UnknownSession.
  std::shared_ptr<const Session> snapshot(const std::string& id) const;

  // Applies `fn` to a private copy and publishes it only if `fn` returns
  // normally. Returns whatever `fn` returns.
  template <class Fn>
  auto mutate(const std::string& id, Fn&& fn) {
    Slot& slot = find_slot(id);
    std::lock_guard writer(slot.write);
    Session copy = *load(slot);
    auto result = fn(copy);
    publish(slot, std::make_shared<const Session>(std::move(copy)));
    return result;
  }

 private:
  struct Slot {
    std::mutex write;
    mutable std::mutex pointer;
    std::shared_ptr<const Session> current;
  };

  Slot& find_slot(const std::string& id) const;
  static std::shared_ptr<const Session> load(const Slot& slot);
  static void publish(Slot& slot, std::shared_ptr<const Session> next);

  mutable std::shared_mutex mutex_;
  std::map<std::string, std::unique_ptr<Slot>> slots_;
};

// Transport-independent request/response API over a SessionStore.
class Api {
 public:
  struct Part {
    std::string name;
    std::string filename;
    std::string content_type;
    std::string content;
  };

  struct Request {
    std::string method;
    std::string path;  // decoded, without query string
    std::map<std::string, std::string> query;
    std::string body;
    std::string content_type;
    std::vector<Part> parts;  // multipart/form-data fields
  };

  struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
  };

  explicit Api(SessionStore& store, ExecContext defaults = {}) : store_(store), defaults_(defaults) {}

  Response handle(const Request& request);

  // Builds a session from uploaded parts: either one "bsx" part, or CSV parts
  // described by a "tracks" JSON part, with optional "manifest" and
  // "session" parts. Returns the session and manifest warnings.
  static std::pair<Session, std::vector<std::string>> session_from_parts(const std::vector<Part>& parts);

 private:
  SessionStore& store_;
  ExecContext defaults_;
};

// Serves `api` over HTTP until stop() is called on the returned handle or the
// process exits. Binds `host:port`; port 0 picks a free port.
class HttpServer {
 public:
  HttpServer(Api& api, std::string host, int port);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  int port() const { return port_; }
  // Blocks serving requests.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace trackx
