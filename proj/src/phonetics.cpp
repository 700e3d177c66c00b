#include "docqa/phonetics.hpp"

#include "docqa/errors.hpp"
#include "docqa/text.hpp"

#include <cctype>

namespace docqa::phonetics {

namespace {

// 0 = vowel-like (breaks duplicate collapsing), 7 = h/w (transparent),
// 1..6 = the consonant groups.
int code_of(char c) {
    switch (c) {
    case 'b': case 'f': case 'p': case 'v':
        return 1;
    case 'c': case 'g': case 'j': case 'k': case 'q': case 's': case 'x': case 'z':
        return 2;
    case 'd': case 't':
        return 3;
    case 'l':
        return 4;
    case 'm': case 'n':
        return 5;
    case 'r':
        return 6;
    case 'h': case 'w':
        return 7;
    default:
        return 0;
    }
}

} // namespace

std::string soundex(std::string_view word, size_t length) {
    if (length < 4) {
        throw ArgumentError("soundex length must be at least 4");
    }
    std::string letters;
    for (char c : text::casefold(word)) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            letters.push_back(c);
        }
    }
    if (letters.empty()) {
        throw ArgumentError("soundex requires at least one letter");
    }

    std::string out;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(letters[0]))));
    int prev = code_of(letters[0]);
    if (prev == 7) {
        prev = 0;
    }
    for (size_t i = 1; i < letters.size() && out.size() < length; ++i) {
        int c = code_of(letters[i]);
        if (c == 7) {
            continue; // h/w: emit nothing, keep prev so duplicates collapse across
        }
        if (c == 0) {
            prev = 0; // vowel: emit nothing, break the duplicate run
            continue;
        }
        if (c != prev) {
            out.push_back(static_cast<char>('0' + c));
        }
        prev = c;
    }
    out.resize(length, '0');
    return out;
}

std::vector<std::string> encode_terms(const std::vector<std::string>& terms, size_t length) {
    std::vector<std::string> out;
    out.reserve(terms.size());
    for (const std::string& t : terms) {
        bool has_letter = false;
        for (char c : t) {
            if (std::isalpha(static_cast<unsigned char>(c))) {
                has_letter = true;
                break;
            }
        }
        out.push_back(has_letter ? soundex(t, length) : t);
    }
    return out;
}

} // namespace docqa::phonetics
