#pragma once

#include <memory>
#include <string>
#include <thread>

#include "common/error.hpp"
#include "engine/engine.hpp"

namespace httplib {
class Server;
}

namespace mempal {

// HTTP status for an engine error.
int http_status(ErrorCode code);

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  // Base directory for relative frame paths in POST /frames.
  std::string frames_dir;
  std::size_t threads = 8;
};

// JSON-over-HTTP facade over one Engine:
//   POST  /calibration          walkthrough {frames, labels} | {room_map}
//   GET   /calibration
//   PATCH /rooms/{old}          {new}
//   POST  /frames               frame batch
//   POST  /query                {session_id, transcript} | {session_id, audio}
//   GET   /sessions/{id}
//   GET   /activities?since&until&object&room
//   GET   /trajectory
//   GET   /export               diary JSON Lines
//   POST  /import               diary JSON Lines (appended)
//   GET   /visual-aid?object=
//   GET   /latency
//   GET   /healthz
// Errors come back as {"error": {code, message}} with http_status(code).
// When the engine has an auth token every route but /healthz needs
// "Authorization: Bearer <token>".
class Service {
 public:
  Service(Engine& engine, ServiceConfig config = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the socket and returns the port. Throws Io.
  int bind();
  // Serves until stop(). Binds first if needed.
  void listen();
  // listen() on a background thread.
  void start();
  void stop();
  int port() const { return port_; }

 private:
  void routes();

  Engine& engine_;
  ServiceConfig config_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  bool bound_ = false;
};

}  // namespace mempal
