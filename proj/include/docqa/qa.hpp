#pragma once

#include "docqa/chunking.hpp"
#include "docqa/tokenization.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace docqa::qa {

struct Answer {
    std::string text;
    double probability = 0.0;
    size_t source_chunk = 0;
    std::string source_paragraph;
};

struct ClientConfig {
    std::string endpoint; // e.g. http://127.0.0.1:8088
    int timeout_seconds = 30;
    size_t max_in_flight = 4;
};

// Sends one POST /answer per chunk ({"question","context"} ->
// {"answer","probability"}) and returns the highest-probability answer.
// Non-empty answers win over empty ones regardless of probability; ties
// break toward the smallest chunk index, so the result is invariant under
// candidate reordering. Answers pass through detokenize when a registry is
// given.
//
// Throws TransportError when every request fails, ProtocolError (naming the
// chunk) on malformed responses.
Answer answer_question(std::string_view question, const std::vector<chunking::Chunk>& candidates,
                       const ClientConfig& config,
                       const tokenization::TokenRegistry* registry = nullptr);

// ---------------------------------------------------------------------------
// Deterministic stub backend
// ---------------------------------------------------------------------------

// Keyword-overlap scorer: the answer is the context sentence sharing the
// most question words, with probability overlap / |question words|. Lets the
// whole pipeline run and be tested without a model.
struct StubResult {
    std::string answer;
    double probability = 0.0;
};

StubResult stub_score(std::string_view question, std::string_view context);

// Serves the QA protocol on 127.0.0.1:<port>.
class StubServer {
public:
    explicit StubServer(int port);
    ~StubServer();

    StubServer(const StubServer&) = delete;
    StubServer& operator=(const StubServer&) = delete;

    // Starts in a background thread; returns once the socket accepts.
    void start();
    void stop();
    // Blocks the calling thread (CLI mode).
    void run();

    int port() const { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_;
};

} // namespace docqa::qa
