#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace docqa::phonetics {

// American Soundex with configurable code length (default 4, the toolkit's
// retrieval channel uses 6). Keeps the first letter, maps the rest through
// the standard consonant table, collapses adjacent duplicates (also across
// h/w), and pads with zeros or truncates to `length`.
//
// Throws ArgumentError when `word` has no letters or length < 4.
std::string soundex(std::string_view word, size_t length = 4);

// Per-term soundex; terms without any letter (numbers, section ids) pass
// through unchanged so they stay matchable.
std::vector<std::string> encode_terms(const std::vector<std::string>& terms, size_t length);

} // namespace docqa::phonetics
