#include "query/templates.hpp"

#include "common/text.hpp"
#include "spatial/room_map.hpp"

namespace mempal {

namespace {

std::string clause(std::string_view s) {
  std::string out = trim(s);
  while (!out.empty() && (out.back() == '.' || out.back() == ' ')) out.pop_back();
  return out;
}

}  // namespace

std::string format_last_seen(std::string_view object, Timestamp at, std::string_view location,
                             std::string_view background, int utc_offset_minutes) {
  const std::string loc = clause(location);
  if (loc.empty() || loc == kUnknownRoom) return std::string(kNotSureAnswer);
  std::string out = "Your " + clause(object) + " was last seen at " + format_clock_12h(at, utc_offset_minutes) +
                    " in the " + loc;
  const std::string bg = clause(background);
  if (!bg.empty()) out += " near " + bg;
  out += '.';
  return out;
}

std::string format_last_seen(const ActivityRecord& record, std::string_view object, int utc_offset_minutes) {
  return format_last_seen(object, record.timestamp, record.location, record.background, utc_offset_minutes);
}

std::string format_last_seen_legacy(std::string_view object, std::string_view location, std::string_view background) {
  const std::string loc = clause(location);
  if (loc.empty() || loc == kUnknownRoom) return std::string(kNotSureAnswer);
  std::string out = "Your " + clause(object) + " was last seen in the " + loc;
  const std::string bg = clause(background);
  if (!bg.empty()) out += " near " + bg;
  out += '.';
  return out;
}

std::string format_context_doc(const ActivityRecord& record, std::string_view location, int utc_offset_minutes) {
  auto flat = [](std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
      if (c == '|' || c == '\n') c = ' ';
    }
    return trim(out);
  };
  return format_clock_12h(record.timestamp, utc_offset_minutes) + " | " + flat(location) + " | " +
         flat(join(record.objects_in_hand, ",")) + " | " + flat(record.background) + " | " + flat(record.activity);
}

}  // namespace mempal
