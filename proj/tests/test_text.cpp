#include "docqa/text.hpp"

#include <doctest.h>

using namespace docqa;

TEST_CASE("word spans cover alnum runs") {
    auto spans = text::word_spans("Hello, world-42!");
    REQUIRE(spans.size() == 3);
    CHECK(spans[0].begin == 0);
    CHECK(spans[0].end == 5);
    CHECK(spans[1].begin == 7);  // world
    CHECK(spans[2].end == 15);   // 42
}

TEST_CASE("casefold lowers ascii and strips latin diacritics") {
    CHECK(text::casefold("HeLLo") == "hello");
    CHECK(text::casefold("Résumé") == "resume");
    CHECK(text::casefold("naïve") == "naive");
}

TEST_CASE("canonical phrase collapses case and whitespace") {
    CHECK(text::canonical_phrase("Common   OWNERSHIP") == "common ownership");
    CHECK(text::canonical_phrase("  one\t two ") == "one two");
    CHECK(text::canonical_phrase("...") == "");
}

TEST_CASE("fnv1a is stable") {
    CHECK(text::fnv1a("") == 14695981039346656037ull);
    CHECK(text::fnv1a("a") == text::fnv1a("a"));
    CHECK(text::fnv1a("a") != text::fnv1a("b"));
}
