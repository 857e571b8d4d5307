#pragma once

#include <string>
#include <string_view>

#include "store/activity_record.hpp"

namespace mempal {

inline constexpr std::string_view kNotSureAnswer = "I'm not sure.";

// "Your <object> was last seen at <h:mm(am|pm)> in the <location> near
// <background>." An empty background drops the " near ..." clause; an
// unknown or empty location yields kNotSureAnswer.
std::string format_last_seen(std::string_view object, Timestamp at, std::string_view location,
                             std::string_view background, int utc_offset_minutes = 0);
std::string format_last_seen(const ActivityRecord& record, std::string_view object, int utc_offset_minutes = 0);

// Older form without the time: "Your <object> was last seen in the
// <location> near <background>."
std::string format_last_seen_legacy(std::string_view object, std::string_view location, std::string_view background);

// Context line handed to the language model:
//   "<h:mm(am|pm)> | <location> | <o1,o2> | <background> | <activity>"
std::string format_context_doc(const ActivityRecord& record, std::string_view location, int utc_offset_minutes = 0);

}  // namespace mempal
