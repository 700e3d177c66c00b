#include "docqa/phonetics.hpp"

#include "docqa/errors.hpp"

#include <doctest.h>

#include <cctype>

using namespace docqa;

TEST_CASE("soundex anchors") {
    CHECK(phonetics::soundex("Hello", 4) == "H400");
    CHECK(phonetics::soundex("Hello", 6) == "H40000");
    CHECK(phonetics::soundex("Hallo", 6) == "H40000");
    CHECK(phonetics::soundex("Robert", 4) == "R163");
}

TEST_CASE("soundex standard traces") {
    CHECK(phonetics::soundex("Rupert", 4) == "R163");
    // h/w bridge: the duplicate code collapses across the h.
    CHECK(phonetics::soundex("Ashcraft", 4) == "A261");
    CHECK(phonetics::soundex("Tymczak", 4) == "T522");
    // First letter's own code collapses with an adjacent duplicate.
    CHECK(phonetics::soundex("Pfister", 4) == "P236");
}

TEST_CASE("soundex same-code pairs used by misspelling-tolerant matching") {
    const std::pair<const char*, const char*> pairs[] = {
        {"Hello", "Hallo"},
        {"definately", "definitely"},
        {"suspicous", "suspicious"},
        {"activty", "activity"},
    };
    for (const auto& [a, b] : pairs) {
        CHECK(phonetics::soundex(a, 6) == phonetics::soundex(b, 6));
    }
}

TEST_CASE("soundex output format") {
    const char* words[] = {"alpha", "Zest", "xylophone", "Institution", "q"};
    for (const char* w : words) {
        for (size_t len : {size_t{4}, size_t{6}, size_t{8}}) {
            std::string code = phonetics::soundex(w, len);
            REQUIRE(code.size() == len);
            CHECK(std::isupper(static_cast<unsigned char>(code[0])));
            for (size_t i = 1; i < code.size(); ++i) {
                CHECK(code[i] >= '0');
                CHECK(code[i] <= '6');
            }
        }
    }
}

TEST_CASE("length-4 code is a prefix of the length-6 code") {
    const char* words[] = {"Hello", "Robert", "suspicious", "Washington", "Lee"};
    for (const char* w : words) {
        CHECK(phonetics::soundex(w, 6).substr(0, 4) == phonetics::soundex(w, 4));
    }
}

TEST_CASE("soundex folds case and diacritics") {
    CHECK(phonetics::soundex("hello", 4) == phonetics::soundex("HELLO", 4));
    CHECK(phonetics::soundex("Résumé", 4) == phonetics::soundex("Resume", 4));
}

TEST_CASE("soundex argument errors") {
    CHECK_THROWS_AS(phonetics::soundex("1985", 4), ArgumentError);
    CHECK_THROWS_AS(phonetics::soundex("", 4), ArgumentError);
    CHECK_THROWS_AS(phonetics::soundex("Hello", 3), ArgumentError);
}

TEST_CASE("encode_terms passes non-letter terms through") {
    auto codes = phonetics::encode_terms({"suspicious", "activity"}, 6);
    REQUIRE(codes.size() == 2);
    CHECK(codes[0].size() == 6);
    CHECK(codes[0][0] == 'S');
    CHECK(codes[1][0] == 'A');

    CHECK(phonetics::encode_terms({"1985"}, 6) == std::vector<std::string>{"1985"});
    CHECK(phonetics::encode_terms({}, 6).empty());
}
