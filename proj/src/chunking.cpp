#include "docqa/chunking.hpp"

#include "docqa/corpus.hpp"
#include "docqa/errors.hpp"

namespace docqa::chunking {

std::vector<Chunk> sliding_window(std::string_view context, size_t window_size, size_t stride,
                                  std::string_view context_id) {
    if (window_size == 0 || stride == 0) {
        throw ArgumentError("window_size and stride must be positive");
    }
    if (stride > window_size) {
        throw ArgumentError("stride larger than window_size would drop tokens");
    }

    std::vector<text::Span> tokens = corpus::count_token_spans(context);
    const size_t total = tokens.size();
    std::vector<Chunk> chunks;
    if (total == 0) {
        return chunks;
    }

    size_t count = 1;
    if (total > window_size) {
        count = (total - window_size + stride - 1) / stride + 1;
    }
    for (size_t i = 0; i < count; ++i) {
        size_t start = i * stride;
        size_t end = std::min(start + window_size, total);
        Chunk c;
        c.context_id = std::string(context_id);
        c.chunk_index = i;
        c.token_start = start;
        c.token_end = end;
        c.text = std::string(
            context.substr(tokens[start].begin, tokens[end - 1].end - tokens[start].begin));
        chunks.push_back(std::move(c));
    }
    return chunks;
}

} // namespace docqa::chunking
