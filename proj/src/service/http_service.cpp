#include "service/http_service.hpp"

#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "common/log.hpp"
#include "common/text.hpp"
#include "service/api.hpp"

namespace mempal {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoLabels:
    case ErrorCode::LabelsOutOfOrder:
    case ErrorCode::EmptySegments:
    case ErrorCode::EmptyMap:
    case ErrorCode::ScenarioInvalid: return 422;
    case ErrorCode::NotCalibrated:
    case ErrorCode::CalibrationInProgress: return 409;
    case ErrorCode::BadTimeRange: return 416;
    case ErrorCode::NoSighting:
    case ErrorCode::NotFound: return 404;
    case ErrorCode::ImageNotRetained: return 410;
    case ErrorCode::Unauthorized: return 401;
    case ErrorCode::ProviderUnavailable:
    case ErrorCode::MalformedProviderOutput:
    case ErrorCode::SinkUnavailable: return 502;
    case ErrorCode::Io:
    case ErrorCode::NoData: return 500;
    default: return 400;
  }
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, {{"error", {{"code", std::string(to_string(code))}, {"message", message}}}}, http_status(code));
}

json parse_body(const httplib::Request& req) {
  if (trim(req.body).empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::InvalidArgument, std::string("request body is not JSON: ") + e.what());
  }
}

std::optional<Timestamp> time_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return api::parse_time_param(req.get_param_value(name));
}

}  // namespace

Service::Service(Engine& engine, ServiceConfig config)
    : engine_(engine), config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
  const std::size_t threads = config_.threads ? config_.threads : 1;
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  routes();
}

Service::~Service() { stop(); }

int Service::bind() {
  if (bound_) return port_;
  if (config_.port == 0) {
    port_ = server_->bind_to_any_port(config_.host);
    if (port_ < 0) fail(ErrorCode::Io, "cannot bind " + config_.host);
  } else {
    if (!server_->bind_to_port(config_.host, config_.port)) {
      fail(ErrorCode::Io, "cannot bind " + config_.host + ":" + std::to_string(config_.port));
    }
    port_ = config_.port;
  }
  bound_ = true;
  return port_;
}

void Service::listen() {
  bind();
  log_info("serving on http://" + config_.host + ":" + std::to_string(port_));
  server_->listen_after_bind();
}

void Service::start() {
  bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void Service::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void Service::routes() {
  auto& s = *server_;
  const std::optional<std::string> token = engine_.config().auth_token;

  s.set_pre_routing_handler([token](const httplib::Request& req, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    if (req.method == "OPTIONS") {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PATCH, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type, Authorization");
      res.status = 204;
      return httplib::Server::HandlerResponse::Handled;
    }
    if (token && !token->empty() && req.path != "/healthz") {
      if (req.get_header_value("Authorization") != "Bearer " + *token) {
        send_error(res, ErrorCode::Unauthorized, "missing or wrong bearer token");
        return httplib::Server::HandlerResponse::Handled;
      }
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const json::exception& e) {
      send_error(res, ErrorCode::InvalidArgument, e.what());
    } catch (const std::exception& e) {
      send_json(res, {{"error", {{"code", "Internal"}, {"message", e.what()}}}}, 500);
    }
  });

  s.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { send_json(res, {{"ok", true}}); });

  s.Post("/calibration", [this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, api::calibrate(engine_, parse_body(req)));
  });
  s.Get("/calibration", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, api::calibration(engine_));
  });
  s.Patch(R"(/rooms/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, api::rename_room(engine_, httplib::detail::decode_url(req.matches[1], false), parse_body(req)));
  });
  s.Post("/frames", [this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, api::ingest(engine_, parse_body(req), config_.frames_dir));
  });
  s.Post("/query", [this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, api::query(engine_, parse_body(req)));
  });
  s.Get(R"(/sessions/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, api::session(engine_, httplib::detail::decode_url(req.matches[1], false)));
  });
  s.Get("/activities", [this](const httplib::Request& req, httplib::Response& res) {
    api::ActivityFilter f{time_param(req, "since"), time_param(req, "until"), req.get_param_value("object"),
                          req.get_param_value("room")};
    send_json(res, api::activities(engine_, f));
  });
  s.Get("/trajectory", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, api::trajectory(engine_));
  });
  s.Get("/export", [this](const httplib::Request&, httplib::Response& res) {
    res.set_header("Content-Disposition", "attachment; filename=\"diary.jsonl\"");
    res.set_content(engine_.export_jsonl(), "application/x-ndjson");
  });
  s.Post("/import", [this](const httplib::Request& req, httplib::Response& res) {
    std::istringstream in(req.body);
    send_json(res, {{"imported", engine_.import_jsonl(in)}});
  });
  s.Get("/visual-aid", [this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, api::visual_aid(engine_, req.get_param_value("object")));
  });
  s.Get("/latency", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, latency_report_to_json(engine_.latency()));
  });
}

}  // namespace mempal
