#include "docqa/commands.hpp"
#include "docqa/errors.hpp"
#include "docqa/phonetics.hpp"
#include "docqa/qa.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitTransport = 4;
constexpr int kExitInternal = 5;

docqa::config::PipelineConfig resolve_config(const std::string& config_path) {
    if (config_path.empty()) {
        return docqa::config::PipelineConfig{};
    }
    return docqa::config::load_config(config_path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"docqa: condense large documents, rank passages and drive an extractive QA "
                 "backend"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "pipeline config file (JSON)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "split a document into a paragraph store");
    std::string ingest_input;
    std::string ingest_output = "paragraphs.json";
    ingest->add_option("input", ingest_input, "plain text or {\"title\",\"text\"} JSON file")
        ->required();
    ingest->add_option("-o,--output", ingest_output, "paragraph store path");

    // tokenize
    auto* tokenize = app.add_subcommand("tokenize", "replace defined terms and phrase groups "
                                                    "with registry tokens");
    std::string tok_store;
    std::string tok_output = "paragraphs.tokenized.json";
    std::string tok_registry = "registry.json";
    std::string tok_warnings = "warnings.jsonl";
    tokenize->add_option("store", tok_store, "paragraph store")->required();
    tokenize->add_option("-o,--output", tok_output, "tokenized store path");
    tokenize->add_option("--registry", tok_registry, "registry output path");
    tokenize->add_option("--warnings", tok_warnings, "warnings report path");

    // index
    auto* index_cmd = app.add_subcommand("index", "build the tf-idf index and train paragraph "
                                                  "vectors");
    std::string index_store;
    std::string index_output = "index.json";
    uint64_t index_seed = 0;
    bool index_seed_set = false;
    index_cmd->add_option("store", index_store, "paragraph store")->required();
    index_cmd->add_option("-o,--output", index_output, "index file path");
    index_cmd->add_option("--seed", index_seed, "paragraph-vector training seed")
        ->each([&](const std::string&) { index_seed_set = true; });

    // rank
    auto* rank_cmd = app.add_subcommand("rank", "rank paragraphs for a question");
    std::string rank_index = "index.json";
    std::string rank_registry;
    std::string rank_question;
    rank_cmd->add_option("question", rank_question, "the question")->required();
    rank_cmd->add_option("--index", rank_index, "index file");
    rank_cmd->add_option("--registry", rank_registry, "token registry (for question matching)");

    // ask
    auto* ask_cmd = app.add_subcommand("ask", "answer a question through the QA backend");
    std::string ask_index = "index.json";
    std::string ask_store;
    std::string ask_registry;
    std::string ask_question_text;
    std::string ask_batch;
    std::string ask_predictions = "predictions.json";
    bool ask_per_paragraph = false;
    ask_cmd->add_option("question", ask_question_text, "the question (omit with --batch)");
    ask_cmd->add_option("--index", ask_index, "index file");
    ask_cmd->add_option("--store", ask_store, "paragraph store")->required();
    ask_cmd->add_option("--registry", ask_registry, "token registry");
    ask_cmd->add_option("--batch", ask_batch, "dataset file; answers every question in it");
    ask_cmd->add_option("--predictions", ask_predictions, "batch output path");
    ask_cmd->add_flag("--per-paragraph", ask_per_paragraph,
                      "window each ranked paragraph separately instead of joining them");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "score predictions with token-level F1 and "
                                                "Q-scores");
    std::string eval_dataset;
    std::vector<std::string> eval_predictions;
    std::string eval_qscores;
    std::string eval_report;
    eval_cmd->add_option("dataset", eval_dataset, "dataset file")->required();
    eval_cmd
        ->add_option("--predictions", eval_predictions,
                     "label=predictions.json (repeatable)")
        ->required();
    eval_cmd->add_option("--q-scores", eval_qscores, "manual q-scores file");
    eval_cmd->add_option("--report", eval_report, "JSON report output path");

    // encode-soundex
    auto* soundex_cmd = app.add_subcommand("encode-soundex", "print the soundex code of a word");
    std::string soundex_word;
    size_t soundex_length = 4;
    soundex_cmd->add_option("word", soundex_word, "the word")->required();
    soundex_cmd->add_option("--length", soundex_length, "code length (>= 4)");

    // stub-qa
    auto* stub_cmd = app.add_subcommand("stub-qa", "run the deterministic stub QA backend");
    int stub_port = 8088;
    stub_cmd->add_option("--port", stub_port, "listen port on 127.0.0.1");

    CLI11_PARSE(app, argc, argv);

    try {
        docqa::config::PipelineConfig config = resolve_config(config_path);

        if (*ingest) {
            docqa::commands::cmd_ingest(ingest_input, ingest_output, config, std::cout);
        } else if (*tokenize) {
            docqa::commands::cmd_tokenize(tok_store, tok_output, tok_registry, tok_warnings,
                                          config, std::cout);
        } else if (*index_cmd) {
            if (index_seed_set) {
                config.ranking.pv.seed = index_seed;
            }
            docqa::commands::cmd_index(index_store, index_output, config, std::cout);
        } else if (*rank_cmd) {
            docqa::commands::cmd_rank(rank_index, rank_registry, rank_question, config,
                                      std::cout);
        } else if (*ask_cmd) {
            if (ask_per_paragraph) {
                config.chunking.per_paragraph = true;
            }
            if (!ask_batch.empty()) {
                docqa::commands::cmd_ask_batch(ask_index, ask_store, ask_registry, ask_batch,
                                               ask_predictions, config, std::cout);
            } else if (ask_question_text.empty()) {
                throw docqa::ArgumentError("ask requires a question or --batch");
            } else {
                docqa::commands::cmd_ask(ask_index, ask_store, ask_registry, ask_question_text,
                                         config, std::cout);
            }
        } else if (*eval_cmd) {
            docqa::commands::cmd_eval(eval_dataset, eval_predictions, eval_qscores, eval_report,
                                      std::cout);
        } else if (*soundex_cmd) {
            std::cout << docqa::phonetics::soundex(soundex_word, soundex_length) << "\n";
        } else if (*stub_cmd) {
            std::cout << "stub qa backend listening on 127.0.0.1:" << stub_port << "\n";
            docqa::qa::StubServer server(stub_port);
            server.run();
        }
        return kExitOk;
    } catch (const docqa::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const docqa::TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const docqa::ProtocolError& e) {
        std::cerr << "protocol error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const docqa::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
