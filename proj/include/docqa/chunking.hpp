#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace docqa::chunking {

// One window over a context. token_span is a half-open [start, end) range of
// token offsets; text covers exactly those tokens in the source string.
struct Chunk {
    std::string context_id;
    size_t chunk_index = 0;
    size_t token_start = 0;
    size_t token_end = 0;
    std::string text;
};

// Overlapping fixed-size windows over `context`, measured in the corpus
// module's tokens. Produces 1 chunk when the context fits in one window,
// otherwise ceil((T - window_size) / stride) + 1 with the last chunk ending
// exactly at the last token.
//
// Throws ArgumentError unless 1 <= stride <= window_size.
std::vector<Chunk> sliding_window(std::string_view context, size_t window_size, size_t stride,
                                  std::string_view context_id = "");

} // namespace docqa::chunking
