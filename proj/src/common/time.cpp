#include "common/time.hpp"

#include <cmath>
#include <cstdio>
#include <thread>

#include <nlohmann/json.hpp>

#include "common/error.hpp"

namespace mempal {

namespace {

int parse_digits(std::string_view s, std::size_t pos, std::size_t n) {
  if (pos + n > s.size()) fail(ErrorCode::BadTimeRange, "truncated timestamp");
  int v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') fail(ErrorCode::BadTimeRange, "bad digit in timestamp '" + std::string(s) + "'");
    v = v * 10 + (c - '0');
  }
  return v;
}

void expect_char(std::string_view s, std::size_t pos, std::string_view allowed) {
  if (pos >= s.size() || allowed.find(s[pos]) == std::string_view::npos) {
    fail(ErrorCode::BadTimeRange, "malformed timestamp '" + std::string(s) + "'");
  }
}

}  // namespace

Timestamp from_unix_seconds(double seconds) {
  if (!std::isfinite(seconds)) fail(ErrorCode::BadTimeRange, "non-finite timestamp");
  return from_unix_ms(static_cast<std::int64_t>(std::llround(seconds * 1000.0)));
}

Duration from_seconds(double seconds) {
  return std::chrono::duration_cast<Duration>(std::chrono::duration<double>(seconds));
}

std::string format_rfc3339(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss<milliseconds> tod{t - day};
  char buf[40];
  const auto ms = tod.subseconds().count();
  if (ms == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                  static_cast<long>(tod.seconds().count()));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld.%03ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                  static_cast<long>(tod.seconds().count()), static_cast<long>(ms));
  }
  return buf;
}

Timestamp parse_rfc3339(std::string_view s) {
  using namespace std::chrono;
  const int y = parse_digits(s, 0, 4);
  expect_char(s, 4, "-");
  const int mo = parse_digits(s, 5, 2);
  expect_char(s, 7, "-");
  const int d = parse_digits(s, 8, 2);
  expect_char(s, 10, "Tt ");
  const int h = parse_digits(s, 11, 2);
  expect_char(s, 13, ":");
  const int mi = parse_digits(s, 14, 2);
  expect_char(s, 16, ":");
  const int se = parse_digits(s, 17, 2);
  std::size_t pos = 19;
  long frac_ms = 0;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    long scale = 100;
    std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      frac_ms += (s[pos] - '0') * scale;
      scale /= 10;
      ++pos;
    }
    if (pos == start) fail(ErrorCode::BadTimeRange, "empty fraction in timestamp");
  }
  int offset_min = 0;
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
    ++pos;
  } else if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    const int sign = s[pos] == '-' ? -1 : 1;
    const int oh = parse_digits(s, pos + 1, 2);
    expect_char(s, pos + 3, ":");
    const int om = parse_digits(s, pos + 4, 2);
    offset_min = sign * (oh * 60 + om);
    pos += 6;
  } else {
    fail(ErrorCode::BadTimeRange, "timestamp '" + std::string(s) + "' lacks a zone designator");
  }
  if (pos != s.size()) fail(ErrorCode::BadTimeRange, "trailing characters in timestamp");

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 60) {
    fail(ErrorCode::BadTimeRange, "timestamp '" + std::string(s) + "' is out of range");
  }
  const auto t = sys_days{ymd} + hours{h} + minutes{mi} + seconds{se} + milliseconds{frac_ms} -
                 minutes{offset_min};
  return time_point_cast<milliseconds>(t);
}

Timestamp timestamp_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_rfc3339(j.get<std::string>());
  if (j.is_number()) return from_unix_seconds(j.get<double>());
  fail(ErrorCode::BadTimeRange, "timestamp must be a string or a number");
}

std::string format_clock_12h(Timestamp t, int utc_offset_minutes) {
  using namespace std::chrono;
  const auto local = t + minutes{utc_offset_minutes};
  const hh_mm_ss<milliseconds> tod{local - floor<days>(local)};
  const long h24 = tod.hours().count();
  const long h12 = h24 % 12 == 0 ? 12 : h24 % 12;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%ld:%02ld%s", h12, static_cast<long>(tod.minutes().count()),
                h24 < 12 ? "am" : "pm");
  return buf;
}

Duration SteadyClock::now() const {
  return std::chrono::duration_cast<Duration>(std::chrono::steady_clock::now().time_since_epoch());
}

void SteadyClock::sleep_for(Duration d) {
  if (d.count() > 0) std::this_thread::sleep_for(d);
}

}  // namespace mempal
