#pragma once

#include "vprgt/session.hpp"

#include <memory>
#include <string>

namespace vprgt {

/// HTTP+JSON front end over an AnnotationService.
///
///   POST /sessions                              create from {scene_id, traj_a, traj_b,
///                                               duration_a, duration_b, params?}
///   GET  /sessions                              list ids
///   GET  /sessions/{id}                         session with trajectories
///   GET  /sessions/{id}/matches                 resolved match list
///   GET  /sessions/{id}/matches/{k}/candidates  ?radius=
///   POST /sessions/{id}/corrections             {version, who?, correction}
///   POST /sessions/{id}/finalize                {version?, who?}
///   POST /sessions/{id}/reopen                  {version, who?}
///   GET  /sessions/{id}/artifacts[/{name}]
///   GET  /media/...                             read-only files under the media root
///
/// Errors are returned as {code, message, detail}.
class HttpServer {
 public:
  explicit HttpServer(AnnotationService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to `port` (0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

int http_status_for(const std::string& error_code);

}  // namespace vprgt
