#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mempal {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with_ci(std::string_view s, std::string_view prefix);

// Lowercase, trim, collapse inner whitespace runs to one space. Used for
// room labels and diary object names.
std::string normalize_label(std::string_view s);

// normalize_label plus stripping of leading articles/possessives ("my",
// "the", "a", ...) and trailing punctuation. Used for object phrases pulled
// out of spoken queries.
std::string normalize_object_phrase(std::string_view s);

// Lowercased word tokens with punctuation removed. Apostrophes are dropped
// inside words ("can't" -> "cant").
std::vector<std::string> word_tokens(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Normalizes every entry, drops empties and duplicates, keeps first-seen order.
std::vector<std::string> normalize_object_list(const std::vector<std::string>& objects);

// 64-bit FNV-1a. Stable across processes and platforms, unlike std::hash.
std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t v);

}  // namespace mempal
