#include <httplib.h>

#include "req2ltl/service.hpp"

namespace req2ltl::service {

using nlohmann::json;

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ServiceError(400, "invalid_json", std::string("request body is not JSON: ") + e.what());
  }
}

std::string string_field(const json& body, const char* key, bool required) {
  if (!body.is_object()) throw ServiceError(400, "invalid_request", "body must be a JSON object");
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) {
    if (required) throw ServiceError(400, "invalid_request", std::string("missing '") + key + "'");
    return {};
  }
  if (!it->is_string()) throw ServiceError(400, "invalid_request", std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

// Runs `fn` and turns thrown errors into {code, message, details} bodies.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const ServiceError& e) {
    send(res, e.status(), e.body());
  } catch (const std::exception& e) {
    send(res, 500, ServiceError(500, "internal", e.what()).body());
  }
}

}  // namespace

struct HttpApi::Impl {
  explicit Impl(ReviewService& s) : service(s) {}
  ReviewService& service;
  httplib::Server server;
};

HttpApi::HttpApi(ReviewService& service) : impl_(std::make_unique<Impl>(service)) {
  auto& svc = impl_->service;
  auto& srv = impl_->server;

  srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { send(res, 200, {{"status", "ok"}}); });

  srv.Post("/sessions", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send(res, 201, svc.create_session(string_field(parse_body(req), "nl", true))); });
  });

  srv.Get(R"(/sessions/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, svc.get_session(req.matches[1])); });
  });

  srv.Patch(R"(/sessions/([^/]+)/tree)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, svc.patch_tree(req.matches[1], parse_body(req))); });
  });

  srv.Post(R"(/sessions/([^/]+)/regenerate)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, svc.regenerate(req.matches[1], string_field(parse_body(req), "feedback", false))); });
  });

  srv.Post(R"(/sessions/([^/]+)/approve)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, svc.approve(req.matches[1])); });
  });

  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const std::string code = res.status == 404 ? "not_found" : res.status == 405 ? "method_not_allowed" : "error";
    send(res, res.status, ServiceError(res.status, code, req.method + " " + req.path + " is not served").body());
  });
}

HttpApi::~HttpApi() { stop(); }

int HttpApi::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw Error("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpApi::listen() { impl_->server.listen_after_bind(); }

void HttpApi::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void HttpApi::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace req2ltl::service
