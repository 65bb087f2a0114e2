#include <httplib.h>

#include "trackx/error.hpp"
#include "trackx/service.hpp"

namespace trackx {

struct HttpServer::Impl {
  httplib::Server server;
  std::string host;
};

namespace {

Api::Request to_request(const httplib::Request& req) {
  Api::Request out;
  out.method = req.method;
  out.path = req.path;
  for (const auto& [k, v] : req.params) out.query[k] = v;
  out.body = req.body;
  out.content_type = req.get_header_value("Content-Type");
  for (const auto& [name, file] : req.files) {
    out.parts.push_back({name, file.filename, file.content_type, file.content});
  }
  return out;
}

}  // namespace

HttpServer::HttpServer(Api& api, std::string host, int port) : impl_(std::make_unique<Impl>()) {
  impl_->host = std::move(host);
  auto handler = [&api](const httplib::Request& req, httplib::Response& res) {
    const Api::Response r = api.handle(to_request(req));
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  // Any path under /sessions goes through the API router.
  impl_->server.Get(R"(/sessions.*)", handler);
  impl_->server.Post(R"(/sessions.*)", handler);
  impl_->server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(impl_->host);
  } else if (impl_->server.bind_to_port(impl_->host, port)) {
    port_ = port;
  } else {
    port_ = -1;
  }
  if (port_ < 0) {
    throw Error(ErrorCode::InvalidArgument, "cannot bind " + impl_->host + ":" + std::to_string(port));
  }
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace trackx
