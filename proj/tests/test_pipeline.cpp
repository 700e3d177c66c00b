#include "docqa/commands.hpp"

#include "docqa/errors.hpp"
#include "docqa/eval.hpp"
#include "docqa/qa.hpp"
#include "docqa/text.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <random>
#include <sstream>

using namespace docqa;
namespace fs = std::filesystem;
using nlohmann::json;

#ifndef DOCQA_DATA_DIR
#define DOCQA_DATA_DIR "data"
#endif

namespace {

std::string data_path(const std::string& rel) {
    return std::string(DOCQA_DATA_DIR) + "/" + rel;
}

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() /
              ("docqa-test-" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

config::PipelineConfig fixture_config() {
    config::PipelineConfig cfg = config::load_config(data_path("default_config.json"));
    cfg.lexicon_path = data_path("fixtures/sample_lexicon.txt");
    cfg.stopwords_path = data_path("stopwords.txt");
    cfg.wordlists_dir = data_path("wordlists");
    cfg.ranking.pv.epochs = 10; // keep the unit suite fast
    cfg.ranking.pv.dim = 16;
    cfg.ranking.pv.min_count = 1;
    return cfg;
}

} // namespace

TEST_CASE("config file loads and validates") {
    config::PipelineConfig cfg = config::load_config(data_path("default_config.json"));
    CHECK(cfg.ranking.weight == 0.5);
    CHECK(cfg.chunking.window_size == 384);
    CHECK(cfg.soundex.length == 6);

    CHECK_THROWS_AS(config::parse_config("{\"ranking\":{\"weight\":1.5}}"), ConfigError);
    CHECK_THROWS_AS(config::parse_config("{\"split\":{\"min_tokens\":400}}"), ConfigError);
    CHECK_THROWS_AS(config::parse_config("{\"chunking\":{\"stride\":999}}"), ConfigError);
    CHECK_THROWS_AS(config::parse_config("not json"), ConfigError);
}

TEST_CASE("ingest command writes a deterministic store") {
    TempDir tmp;
    config::PipelineConfig cfg = fixture_config();
    std::ostringstream out;
    size_t n = commands::cmd_ingest(data_path("fixtures/sample_regulation.txt"),
                                    tmp / "store.json", cfg, out);
    CHECK(n > 1);
    CHECK(out.str().find("paragraphs") != std::string::npos);
    std::string first = text::read_file(tmp / "store.json");

    commands::cmd_ingest(data_path("fixtures/sample_regulation.txt"), tmp / "store.json", cfg,
                         out);
    CHECK(text::read_file(tmp / "store.json") == first);
}

TEST_CASE("ingest command fails cleanly on missing inputs and bad configs") {
    TempDir tmp;
    config::PipelineConfig cfg = fixture_config();
    std::ostringstream out;
    CHECK_THROWS_AS(
        commands::cmd_ingest(tmp / "missing.txt", tmp / "store.json", cfg, out), InputError);
    cfg.split.min_tokens = cfg.split.max_tokens;
    CHECK_THROWS_AS(commands::cmd_ingest(data_path("fixtures/sample_regulation.txt"),
                                         tmp / "store.json", cfg, out),
                    ConfigError);
}

TEST_CASE("ingest accepts structured JSON documents") {
    TempDir tmp;
    text::write_file(tmp / "doc.json",
                     R"({"title": "mini", "text": "First sentence here. Second sentence too."})");
    config::PipelineConfig cfg = fixture_config();
    cfg.split.min_tokens = 1;
    std::ostringstream out;
    size_t n = commands::cmd_ingest(tmp / "doc.json", tmp / "store.json", cfg, out);
    CHECK(n == 1);
    CHECK(out.str().find("mini") != std::string::npos);
}

TEST_CASE("tokenize command writes store, registry and warnings") {
    TempDir tmp;
    config::PipelineConfig cfg = fixture_config();
    std::ostringstream out;
    commands::cmd_ingest(data_path("fixtures/sample_regulation.txt"), tmp / "store.json", cfg,
                         out);
    auto outcome = commands::cmd_tokenize(tmp / "store.json", tmp / "tokenized.json",
                                          tmp / "registry.json", tmp / "warnings.jsonl", cfg,
                                          out);
    CHECK(outcome.tokens_after < outcome.tokens_before);
    CHECK(outcome.registry_size > 0);

    auto reg = tokenization::TokenRegistry::from_json(text::read_file(tmp / "registry.json"));
    // The fixture's definition sentences land in the registry.
    CHECK(reg.token_for("covered institution").has_value());
    CHECK(reg.token_for("common ownership").has_value());

    // Rerunning over its own output mints nothing new: every phrase is
    // already a token symbol.
    auto second = commands::cmd_tokenize(tmp / "tokenized.json", tmp / "tokenized2.json",
                                         tmp / "registry2.json", tmp / "warnings2.jsonl", cfg,
                                         out);
    CHECK(second.tokens_after == second.tokens_before);
}

TEST_CASE("tokenize with both stages disabled copies the store") {
    TempDir tmp;
    config::PipelineConfig cfg = fixture_config();
    cfg.definition_stage = false;
    cfg.dependency_stage = false;
    std::ostringstream out;
    commands::cmd_ingest(data_path("fixtures/sample_regulation.txt"), tmp / "store.json", cfg,
                         out);
    auto outcome = commands::cmd_tokenize(tmp / "store.json", tmp / "tokenized.json",
                                          tmp / "registry.json", tmp / "warnings.jsonl", cfg,
                                          out);
    CHECK(outcome.tokens_after == outcome.tokens_before);
    auto before = corpus::store_from_json(text::read_file(tmp / "store.json"));
    auto after = corpus::store_from_json(text::read_file(tmp / "tokenized.json"));
    REQUIRE(before.size() == after.size());
    for (size_t i = 0; i < before.size(); ++i) {
        CHECK(before[i].text == after[i].text);
    }
}

TEST_CASE("index and rank commands compose") {
    TempDir tmp;
    config::PipelineConfig cfg = fixture_config();
    std::ostringstream out;
    commands::cmd_ingest(data_path("fixtures/sample_regulation.txt"), tmp / "store.json", cfg,
                         out);
    commands::cmd_tokenize(tmp / "store.json", tmp / "tokenized.json", tmp / "registry.json",
                           tmp / "warnings.jsonl", cfg, out);
    commands::cmd_index(tmp / "tokenized.json", tmp / "index.json", cfg, out);

    std::ostringstream ranked;
    commands::cmd_rank(tmp / "index.json", tmp / "registry.json",
                       "When does a covered institution file a report?", cfg, ranked);
    json arr = json::parse(ranked.str().substr(ranked.str().find('[')));
    REQUIRE(!arr.empty());
    CHECK(arr[0].contains("paragraph_id"));
    CHECK(arr[0]["rank"] == 1);
}

TEST_CASE("ask command runs the full flow against the stub backend") {
    TempDir tmp;
    config::PipelineConfig cfg = fixture_config();
    std::ostringstream out;
    commands::cmd_ingest(data_path("fixtures/sample_regulation.txt"), tmp / "store.json", cfg,
                         out);
    commands::cmd_tokenize(tmp / "store.json", tmp / "tokenized.json", tmp / "registry.json",
                           tmp / "warnings.jsonl", cfg, out);
    commands::cmd_index(tmp / "tokenized.json", tmp / "index.json", cfg, out);

    qa::StubServer server(18490);
    server.start();
    cfg.qa_endpoint = "http://127.0.0.1:18490";

    std::ostringstream answer_out;
    commands::cmd_ask(tmp / "index.json", tmp / "tokenized.json", tmp / "registry.json",
                      "Where does the institution retain supporting documentation?", cfg,
                      answer_out);
    json answer = json::parse(answer_out.str());
    CHECK(!answer["answer"].get<std::string>().empty());
    CHECK(answer["probability"].get<double>() > 0.0);
    // The detokenized answer speaks the original vocabulary, not symbols.
    CHECK(answer["answer"].get<std::string>().find("Y1Y") == std::string::npos);
    CHECK(answer["answer"].get<std::string>().find("X1X") == std::string::npos);

    // Per-paragraph windowing attributes the answer to a single paragraph.
    cfg.chunking.per_paragraph = true;
    std::ostringstream per_para_out;
    commands::cmd_ask(tmp / "index.json", tmp / "tokenized.json", tmp / "registry.json",
                      "Where does the institution retain supporting documentation?", cfg,
                      per_para_out);
    json per_para = json::parse(per_para_out.str());
    CHECK(!per_para["answer"].get<std::string>().empty());
    CHECK(!per_para["source_paragraph"].get<std::string>().empty());

    server.stop();
}

TEST_CASE("batch ask plus eval closes the loop") {
    TempDir tmp;
    config::PipelineConfig cfg = fixture_config();
    cfg.definition_stage = false;
    cfg.dependency_stage = false; // keep the gold answers literally findable
    std::ostringstream out;
    commands::cmd_ingest(data_path("fixtures/sample_regulation.txt"), tmp / "store.json", cfg,
                         out);
    commands::cmd_index(tmp / "store.json", tmp / "index.json", cfg, out);

    qa::StubServer server(18491);
    server.start();
    cfg.qa_endpoint = "http://127.0.0.1:18491";

    commands::cmd_ask_batch(tmp / "index.json", tmp / "store.json", "",
                            data_path("fixtures/sample_questions.json"),
                            tmp / "predictions.json", cfg, out);
    server.stop();

    auto preds = eval::load_predictions(text::read_file(tmp / "predictions.json"));
    CHECK(preds.size() == 3);

    std::ostringstream table;
    commands::cmd_eval(data_path("fixtures/sample_questions.json"),
                       {"stub=" + (tmp / "predictions.json")}, "", tmp / "report.json", table);
    CHECK(table.str().find("stub F1") != std::string::npos);

    json report = json::parse(text::read_file(tmp / "report.json"));
    double mean_f1 = report["documents"][0]["systems"][0]["mean_f1"].get<double>();
    // The stub answers whole sentences that contain the gold span.
    CHECK(mean_f1 > 0.3);
}
