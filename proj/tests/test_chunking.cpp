#include "docqa/chunking.hpp"

#include "docqa/corpus.hpp"
#include "docqa/errors.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace docqa;

namespace {

std::string make_context(size_t tokens) {
    std::ostringstream out;
    for (size_t i = 0; i < tokens; ++i) {
        if (i > 0) {
            out << ' ';
        }
        out << "t" << i;
    }
    return out.str();
}

} // namespace

TEST_CASE("context fitting in one window yields one chunk") {
    auto chunks = chunking::sliding_window(make_context(100), 384, 128);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].token_start == 0);
    CHECK(chunks[0].token_end == 100);
}

TEST_CASE("1000 tokens with window 384 and stride 128 gives 6 chunks") {
    std::string context = make_context(1000);
    auto chunks = chunking::sliding_window(context, 384, 128);
    REQUIRE(chunks.size() == 6);
    CHECK(chunks[0].token_start == 0);
    CHECK(chunks[0].token_end == 384);
    CHECK(chunks[5].token_start == 640);
    CHECK(chunks[5].token_end == 1000);
    for (size_t i = 0; i + 1 < chunks.size(); ++i) {
        CHECK(chunks[i + 1].token_start == chunks[i].token_start + 128);
    }
}

TEST_CASE("invalid strides are argument errors") {
    CHECK_THROWS_AS(chunking::sliding_window("a b c", 4, 0), ArgumentError);
    CHECK_THROWS_AS(chunking::sliding_window("a b c", 4, 5), ArgumentError);
}

TEST_CASE("chunk text covers exactly the spanned tokens") {
    std::string context = "alpha beta gamma delta epsilon zeta";
    auto chunks = chunking::sliding_window(context, 3, 2);
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[0].text == "alpha beta gamma");
    CHECK(chunks[1].text == "gamma delta epsilon");
    CHECK(chunks[2].text == "epsilon zeta");
}

TEST_CASE("random windows satisfy the count formula, coverage and overlap") {
    std::mt19937 rng(42);
    for (int round = 0; round < 60; ++round) {
        size_t total = 1 + rng() % 600;
        size_t window = 1 + rng() % 100;
        size_t stride = 1 + rng() % window;
        std::string context = make_context(total);
        auto chunks = chunking::sliding_window(context, window, stride);

        size_t expected =
            total <= window ? 1 : (total - window + stride - 1) / stride + 1;
        REQUIRE(chunks.size() == expected);

        CHECK(chunks.front().token_start == 0);
        CHECK(chunks.back().token_end == total);
        for (size_t i = 0; i < chunks.size(); ++i) {
            CHECK(chunks[i].token_end - chunks[i].token_start <= window);
            if (i + 1 < chunks.size()) {
                // Full coverage requires each next chunk to start inside the
                // previous one; adjacent chunks share window - stride tokens.
                CHECK(chunks[i + 1].token_start <= chunks[i].token_end);
                size_t shared = std::min(chunks[i].token_end, chunks[i + 1].token_end) -
                                chunks[i + 1].token_start;
                if (i + 2 < chunks.size()) {
                    CHECK(shared == window - stride);
                }
            }
        }
    }
}

TEST_CASE("concatenating non-overlapping suffixes restores the token stream") {
    std::string context = make_context(57);
    auto token_spans = corpus::count_token_spans(context);
    auto chunks = chunking::sliding_window(context, 16, 7);
    std::string rebuilt;
    size_t covered = 0;
    for (const auto& chunk : chunks) {
        for (size_t t = std::max(chunk.token_start, covered); t < chunk.token_end; ++t) {
            if (!rebuilt.empty()) {
                rebuilt += ' ';
            }
            rebuilt += context.substr(token_spans[t].begin, token_spans[t].size());
        }
        covered = chunk.token_end;
    }
    CHECK(rebuilt == context);
}
