#pragma once

#include <functional>
#include <string_view>

namespace mempal {

enum class LogLevel { Debug, Info, Warning, Error };

using LogHandler = std::function<void(LogLevel, std::string_view)>;

// Process-wide log hook. The default handler writes warnings and errors to
// stderr; tests install their own to capture messages.
void set_log_handler(LogHandler handler);
void log(LogLevel level, std::string_view message);

inline void log_warning(std::string_view message) { log(LogLevel::Warning, message); }
inline void log_info(std::string_view message) { log(LogLevel::Info, message); }

}  // namespace mempal
