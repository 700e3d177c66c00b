#include "docqa/qa.hpp"

#include "docqa/corpus.hpp"
#include "docqa/errors.hpp"
#include "docqa/retrieval.hpp"
#include "docqa/text.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <thread>

namespace docqa::qa {

using json = nlohmann::json;

namespace {

struct ChunkOutcome {
    bool ok = false;
    std::string answer;
    double probability = 0.0;
    std::string error;
};

ChunkOutcome request_answer(std::string_view question, const chunking::Chunk& chunk,
                            const ClientConfig& config) {
    ChunkOutcome outcome;
    json req;
    req["question"] = std::string(question);
    req["context"] = chunk.text;

    httplib::Client client(config.endpoint);
    client.set_connection_timeout(config.timeout_seconds);
    client.set_read_timeout(config.timeout_seconds);
    auto res = client.Post("/answer", req.dump(), "application/json");
    if (!res) {
        outcome.error = httplib::to_string(res.error());
        return outcome;
    }
    if (res->status != 200) {
        throw ProtocolError("qa backend returned status " + std::to_string(res->status) +
                            " for chunk " + std::to_string(chunk.chunk_index));
    }
    json body;
    try {
        body = json::parse(res->body);
    } catch (const json::parse_error&) {
        throw ProtocolError("qa backend response for chunk " +
                            std::to_string(chunk.chunk_index) + " is not valid JSON");
    }
    if (!body.contains("answer") || !body.contains("probability") ||
        !body["probability"].is_number()) {
        throw ProtocolError("qa backend response for chunk " +
                            std::to_string(chunk.chunk_index) +
                            " must carry \"answer\" and \"probability\"");
    }
    outcome.ok = true;
    outcome.answer = body["answer"].get<std::string>();
    double p = body["probability"].get<double>();
    if (!std::isfinite(p)) {
        throw ProtocolError("qa backend returned a non-finite probability for chunk " +
                            std::to_string(chunk.chunk_index));
    }
    outcome.probability = std::clamp(p, 0.0, 1.0);
    return outcome;
}

} // namespace

Answer answer_question(std::string_view question, const std::vector<chunking::Chunk>& candidates,
                       const ClientConfig& config,
                       const tokenization::TokenRegistry* registry) {
    if (candidates.empty()) {
        throw ArgumentError("answer_question requires at least one chunk");
    }
    if (config.endpoint.empty()) {
        throw ConfigError("qa endpoint is not configured");
    }

    // Issue requests in bounded batches; the reduction below is independent
    // of completion order.
    std::vector<ChunkOutcome> outcomes(candidates.size());
    const size_t cap = std::max<size_t>(1, config.max_in_flight);
    for (size_t base = 0; base < candidates.size(); base += cap) {
        size_t end = std::min(base + cap, candidates.size());
        std::vector<std::future<ChunkOutcome>> inflight;
        for (size_t i = base; i < end; ++i) {
            inflight.push_back(std::async(std::launch::async, [&, i] {
                return request_answer(question, candidates[i], config);
            }));
        }
        for (size_t i = base; i < end; ++i) {
            outcomes[i] = inflight[i - base].get();
        }
    }

    size_t failures = 0;
    std::string first_error;
    for (const ChunkOutcome& o : outcomes) {
        if (!o.ok) {
            ++failures;
            if (first_error.empty()) {
                first_error = o.error;
            }
        }
    }
    if (failures == outcomes.size()) {
        throw TransportError("all " + std::to_string(failures) + " qa requests failed (" +
                             first_error + ")");
    }

    // Highest probability wins; non-empty answers outrank empty ones; ties
    // break toward the earliest chunk index.
    auto better = [&](size_t a, size_t b) {
        const ChunkOutcome& oa = outcomes[a];
        const ChunkOutcome& ob = outcomes[b];
        if (oa.answer.empty() != ob.answer.empty()) {
            return !oa.answer.empty();
        }
        if (oa.probability != ob.probability) {
            return oa.probability > ob.probability;
        }
        return candidates[a].chunk_index < candidates[b].chunk_index;
    };
    size_t best = candidates.size();
    for (size_t i = 0; i < candidates.size(); ++i) {
        if (!outcomes[i].ok) {
            continue;
        }
        if (best == candidates.size() || better(i, best)) {
            best = i;
        }
    }

    Answer answer;
    answer.text = outcomes[best].answer;
    answer.probability = outcomes[best].probability;
    answer.source_chunk = candidates[best].chunk_index;
    answer.source_paragraph = candidates[best].context_id;
    if (registry != nullptr) {
        answer.text = tokenization::detokenize(answer.text, *registry);
    }
    return answer;
}

// ---------------------------------------------------------------------------
// Stub backend
// ---------------------------------------------------------------------------

StubResult stub_score(std::string_view question, std::string_view context) {
    std::set<std::string> q_terms;
    for (const std::string& w : text::words(text::casefold(question))) {
        q_terms.insert(w);
    }
    const std::vector<std::string> stop = retrieval::default_stopwords();
    for (const std::string& s : stop) {
        q_terms.erase(s);
    }

    StubResult best;
    if (q_terms.empty()) {
        return best;
    }
    for (const std::string& sentence : corpus::segment_sentences(context)) {
        std::set<std::string> s_terms;
        for (const std::string& w : text::words(text::casefold(sentence))) {
            s_terms.insert(w);
        }
        size_t overlap = 0;
        for (const std::string& t : q_terms) {
            overlap += s_terms.count(t);
        }
        double p = static_cast<double>(overlap) / static_cast<double>(q_terms.size());
        if (p > best.probability) {
            best.probability = p;
            best.answer = sentence;
        }
    }
    return best;
}

struct StubServer::Impl {
    httplib::Server server;
    std::thread thread;
};

StubServer::StubServer(int port) : impl_(std::make_unique<Impl>()), port_(port) {
    impl_->server.Post("/answer", [](const httplib::Request& req, httplib::Response& res) {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::parse_error&) {
            res.status = 400;
            res.set_content("{\"error\":\"invalid JSON\"}", "application/json");
            return;
        }
        if (!body.contains("question") || !body.contains("context")) {
            res.status = 400;
            res.set_content("{\"error\":\"question and context required\"}", "application/json");
            return;
        }
        StubResult r = stub_score(body["question"].get<std::string>(),
                                  body["context"].get<std::string>());
        json out;
        out["answer"] = r.answer;
        out["probability"] = r.probability;
        res.set_content(out.dump(), "application/json");
    });
}

StubServer::~StubServer() {
    stop();
}

void StubServer::start() {
    impl_->thread = std::thread([this] { impl_->server.listen("127.0.0.1", port_); });
    impl_->server.wait_until_ready();
}

void StubServer::stop() {
    if (impl_->server.is_running()) {
        impl_->server.stop();
    }
    if (impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

void StubServer::run() {
    impl_->server.listen("127.0.0.1", port_);
}

} // namespace docqa::qa
