#include "vprgt/http_api.hpp"

#include "vprgt/error.hpp"
#include "vprgt/json_io.hpp"

#include <httplib.h>

#include <fstream>
#include <sstream>

namespace vprgt {

using nlohmann::json;
namespace fs = std::filesystem;

int http_status_for(const std::string& error_code) {
  if (error_code == "not_found") return 404;
  if (error_code == "version_conflict" || error_code == "state_error") return 409;
  if (error_code == "validation_error" || error_code == "parse_error") return 400;
  if (error_code == "degenerate") return 422;
  return 500;
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const std::string& code, const std::string& message,
                const std::string& detail) {
  send_json(res, {{"code", code}, {"message", message}, {"detail", detail}},
            http_status_for(code));
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw ParseError("request body is not valid JSON", e.what());
  }
}

std::uint64_t body_version(const json& body) {
  const auto it = body.find("version");
  if (it == body.end() || !it->is_number_unsigned()) {
    throw ValidationError("request needs the non-negative integer 'version' it was based on");
  }
  return it->get<std::uint64_t>();
}

std::size_t parse_index(const std::string& text, const char* what) {
  std::size_t value = 0;
  std::size_t used = 0;
  try {
    value = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ValidationError(std::string("invalid ") + what + " '" + text + "'");
  }
  return value;
}

template <class Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what(), e.detail());
    } catch (const json::exception& e) {
      send_error(res, "validation_error", "malformed JSON field", e.what());
    } catch (const std::exception& e) {
      send_error(res, "internal_error", e.what(), "");
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  AnnotationService& service;
  httplib::Server server;

  explicit Impl(AnnotationService& s) : service(s) {}
};

HttpServer::HttpServer(AnnotationService& service) : impl_(std::make_unique<Impl>(service)) {
  auto& svc = impl_->service;
  auto& srv = impl_->server;

  srv.Post("/sessions", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             const auto session = svc.create_session(session_request_from_json(parse_body(req)));
             send_json(res, to_json(*session), 201);
           }));
  srv.Get("/sessions", guarded([&svc](const httplib::Request&, httplib::Response& res) {
            send_json(res, {{"sessions", svc.list_sessions()}});
          }));
  srv.Get("/sessions/:id", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            send_json(res, to_json(*svc.get(req.path_params.at("id")), true));
          }));
  srv.Get("/sessions/:id/matches",
          guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            const auto s = svc.get(req.path_params.at("id"));
            send_json(res, {{"version", s->version},
                            {"status", std::string(to_string(s->status))},
                            {"matches", to_json(s->matches, s->tps_a, s->tps_b)}});
          }));
  srv.Get("/sessions/:id/matches/:k/candidates",
          guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            std::optional<std::size_t> radius;
            if (req.has_param("radius")) radius = parse_index(req.get_param_value("radius"), "radius");
            const auto k = parse_index(req.path_params.at("k"), "match position");
            send_json(res, to_json(svc.get_candidates(req.path_params.at("id"), k, radius)));
          }));
  srv.Post("/sessions/:id/corrections",
           guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             const json body = parse_body(req);
             if (!body.contains("correction")) {
               throw ValidationError("request needs a 'correction' object");
             }
             const auto s = svc.submit_correction(req.path_params.at("id"), body["correction"],
                                                  body_version(body),
                                                  body.value("who", std::string("anonymous")));
             send_json(res, to_json(*s));
           }));
  srv.Post("/sessions/:id/finalize",
           guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             const json body = parse_body(req);
             std::optional<std::uint64_t> version;
             if (body.contains("version")) version = body_version(body);
             const auto id = req.path_params.at("id");
             svc.finalize_session(id, version, body.value("who", std::string("anonymous")));
             send_json(res, to_json(*svc.get(id)));
           }));
  srv.Post("/sessions/:id/reopen",
           guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             const json body = parse_body(req);
             const auto s = svc.reopen_session(req.path_params.at("id"), body_version(body),
                                               body.value("who", std::string("anonymous")));
             send_json(res, to_json(*s));
           }));
  srv.Get("/sessions/:id/artifacts",
          guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            const auto s = svc.get(req.path_params.at("id"));
            json items = json::array();
            for (const auto& name : s->artifacts) {
              items.push_back({{"name", name},
                               {"url", "/sessions/" + s->session_id + "/artifacts/" + name}});
            }
            send_json(res, {{"status", std::string(to_string(s->status))},
                            {"artifacts", std::move(items)}});
          }));
  srv.Get("/sessions/:id/artifacts/:name",
          guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            const auto s = svc.get(req.path_params.at("id"));
            const auto& name = req.path_params.at("name");
            if (std::find(s->artifacts.begin(), s->artifacts.end(), name) == s->artifacts.end()) {
              throw NotFoundError("no artifact '" + name + "' in session " + s->session_id);
            }
            std::ifstream in(svc.artifact_path(s->session_id, name), std::ios::binary);
            if (!in) throw NotFoundError("artifact file missing", name);
            std::ostringstream buffer;
            buffer << in.rdbuf();
            const bool is_json = fs::path(name).extension() == ".json";
            res.set_content(buffer.str(), is_json ? "application/json" : "text/plain");
          }));

  if (svc.options().media_root) {
    if (!srv.set_mount_point("/media", svc.options().media_root->string())) {
      throw IoError("media root is not a directory", svc.options().media_root->string());
    }
  }
  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.body.empty() && res.status == 404) {
      send_error(res, "not_found", "no route for " + req.method + " " + req.path, "");
    }
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  if (!impl_->server.bind_to_port(host, port)) {
    throw IoError("cannot bind to port " + std::to_string(port), host);
  }
  return port;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace vprgt
