#pragma once

#include <string>
#include <string_view>

namespace mempal {

// Versioned default prompt for frame-batch descriptions. The text lives in
// assets/prompts/ and is compiled in; "{previous_activity}" is substituted
// before the call.
inline constexpr std::string_view kVlmPromptId = "vlm_describe/v1";
std::string_view default_vlm_prompt();
std::string render_vlm_prompt(std::string_view prompt_template, std::string_view previous_activity);

// Markers shared by the prompts the query engine builds and the mock
// language model that answers them.
inline constexpr std::string_view kExtractObjectTask = "Task: extract-object";
inline constexpr std::string_view kQuestionLabel = "Question:";

}  // namespace mempal
