#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace mempal {

// Wall-clock instant with millisecond resolution, UTC.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Duration = std::chrono::nanoseconds;

inline Timestamp from_unix_ms(std::int64_t ms) { return Timestamp{std::chrono::milliseconds{ms}}; }
inline std::int64_t to_unix_ms(Timestamp t) { return t.time_since_epoch().count(); }
Timestamp from_unix_seconds(double seconds);
inline double to_seconds(Duration d) { return std::chrono::duration<double>(d).count(); }
Duration from_seconds(double seconds);

// "2024-05-14T15:05:00Z", with ".mmm" when the millisecond part is non-zero.
std::string format_rfc3339(Timestamp t);

// Accepts "YYYY-MM-DDTHH:MM:SS[.fff](Z|±HH:MM)" and a space instead of 'T'.
// Throws Error{BadTimeRange} when the text is not a timestamp.
Timestamp parse_rfc3339(std::string_view text);

// JSON timestamps are either RFC 3339 strings or numbers of seconds since
// the Unix epoch.
Timestamp timestamp_from_json(const nlohmann::json& j);

// 12-hour clock rendering used by answers: "3:05pm", "12:00am".
std::string format_clock_12h(Timestamp t, int utc_offset_minutes = 0);

// Monotonic time source for stage and query latency accounting. Mock
// providers "sleep" through the clock, so a ManualClock makes replays
// deterministic and fast.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Duration now() const = 0;
  virtual void sleep_for(Duration d) = 0;
};

class SteadyClock final : public Clock {
 public:
  Duration now() const override;
  void sleep_for(Duration d) override;
};

class ManualClock final : public Clock {
 public:
  Duration now() const override { return Duration{now_.load()}; }
  void sleep_for(Duration d) override { advance(d); }
  void advance(Duration d) { now_.fetch_add(d.count()); }

 private:
  std::atomic<std::int64_t> now_{0};
};

}  // namespace mempal
