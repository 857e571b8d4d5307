#include "common/log.hpp"

#include <iostream>
#include <mutex>

namespace mempal {

namespace {

std::mutex& handler_mutex() {
  static std::mutex mu;
  return mu;
}

LogHandler& handler() {
  static LogHandler h = [](LogLevel level, std::string_view message) {
    if (level < LogLevel::Warning) return;
    std::cerr << (level == LogLevel::Warning ? "[warn] " : "[error] ") << message << '\n';
  };
  return h;
}

}  // namespace

void set_log_handler(LogHandler h) {
  std::lock_guard lock(handler_mutex());
  handler() = std::move(h);
}

void log(LogLevel level, std::string_view message) {
  std::lock_guard lock(handler_mutex());
  if (handler()) handler()(level, message);
}

}  // namespace mempal
