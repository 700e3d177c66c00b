#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace docqa::text {

// Half-open [begin, end) character span into some source string.
struct Span {
    size_t begin = 0;
    size_t end = 0;

    size_t size() const { return end - begin; }
};

// A word is a maximal run of alphanumeric characters; bytes >= 0x80 are
// treated as word characters so UTF-8 sequences stay intact.
bool is_word_char(unsigned char c);

// Spans of all words in `s`, in order.
std::vector<Span> word_spans(std::string_view s);

// Words of `s` as strings, in order.
std::vector<std::string> words(std::string_view s);

// ASCII lowercase; common two-byte UTF-8 Latin letters are folded to their
// unaccented ASCII base so "Résumé" and "Resume" compare equal downstream.
std::string casefold(std::string_view s);

// Casefolded words joined by single spaces. The registry and the phrase
// matcher both key on this form, so "Common   OWNERSHIP" and
// "common ownership" collapse to one entry.
std::string canonical_phrase(std::string_view s);

// Casefolded whitespace-collapsed copy (keeps punctuation, unlike
// canonical_phrase).
std::string collapse_whitespace(std::string_view s);

std::string trim(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);

// 64-bit FNV-1a, used for stable document ids.
uint64_t fnv1a(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

} // namespace docqa::text
