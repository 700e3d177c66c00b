#include "docqa/text.hpp"

#include "docqa/errors.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

namespace docqa::text {

bool is_word_char(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

std::vector<Span> word_spans(std::string_view s) {
    std::vector<Span> spans;
    size_t i = 0;
    while (i < s.size()) {
        if (!is_word_char(static_cast<unsigned char>(s[i]))) {
            ++i;
            continue;
        }
        size_t begin = i;
        while (i < s.size() && is_word_char(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        spans.push_back({begin, i});
    }
    return spans;
}

std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    for (const Span& span : word_spans(s)) {
        out.emplace_back(s.substr(span.begin, span.size()));
    }
    return out;
}

namespace {

// Two-byte UTF-8 Latin-1 supplement letters mapped to ASCII base letters.
// Anything not in the table passes through unchanged.
char fold_latin1(unsigned char second) {
    struct Range {
        unsigned char lo, hi;
        char base;
    };
    static constexpr std::array<Range, 18> ranges{{
        {0x80, 0x85, 'a'}, {0x87, 0x87, 'c'}, {0x88, 0x8b, 'e'}, {0x8c, 0x8f, 'i'},
        {0x91, 0x91, 'n'}, {0x92, 0x96, 'o'}, {0x98, 0x98, 'o'}, {0x99, 0x9c, 'u'},
        {0x9d, 0x9d, 'y'}, {0xa0, 0xa5, 'a'}, {0xa7, 0xa7, 'c'}, {0xa8, 0xab, 'e'},
        {0xac, 0xaf, 'i'}, {0xb1, 0xb1, 'n'}, {0xb2, 0xb6, 'o'}, {0xb8, 0xb8, 'o'},
        {0xb9, 0xbc, 'u'}, {0xbd, 0xbf, 'y'},
    }};
    for (const Range& r : ranges) {
        if (second >= r.lo && second <= r.hi) {
            return r.base;
        }
    }
    return 0;
}

} // namespace

std::string casefold(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (c < 0x80) {
            out.push_back(static_cast<char>(std::tolower(c)));
        } else if ((c == 0xc3) && i + 1 < s.size()) {
            char base = fold_latin1(static_cast<unsigned char>(s[i + 1]));
            if (base != 0) {
                out.push_back(base);
                ++i;
            } else {
                out.push_back(s[i]);
            }
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

std::string canonical_phrase(std::string_view s) {
    std::string folded = casefold(s);
    std::string out;
    for (const Span& span : word_spans(folded)) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out.append(folded, span.begin, span.size());
    }
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string folded = casefold(s);
    std::string out;
    bool in_space = true;
    for (char c : folded) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_space) {
                out.push_back(' ');
            }
            in_space = true;
        } else {
            out.push_back(c);
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') {
        out.pop_back();
    }
    return out;
}

std::string trim(std::string_view s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return std::string(s.substr(b, e - b));
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

uint64_t fnv1a(std::string_view s) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write file: " + path);
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

} // namespace docqa::text
