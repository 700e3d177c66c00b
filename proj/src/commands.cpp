#include "docqa/commands.hpp"

#include "docqa/chunking.hpp"
#include "docqa/errors.hpp"
#include "docqa/eval.hpp"
#include "docqa/qa.hpp"
#include "docqa/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <ostream>

namespace docqa::commands {

using json = nlohmann::ordered_json;

namespace {

corpus::Document document_from_store(std::vector<corpus::Paragraph> paragraphs) {
    corpus::Document doc;
    if (!paragraphs.empty()) {
        doc.id = paragraphs.front().doc_id;
    }
    for (size_t i = 0; i < paragraphs.size(); ++i) {
        paragraphs[i].leading_separator = i == 0 ? "" : "\n\n";
    }
    doc.paragraphs = std::move(paragraphs);
    doc.raw_text = corpus::reconstruct(doc);
    return doc;
}

size_t total_tokens(const std::vector<corpus::Paragraph>& paragraphs) {
    return std::accumulate(paragraphs.begin(), paragraphs.end(), size_t{0},
                           [](size_t acc, const corpus::Paragraph& p) {
                               return acc + p.token_count;
                           });
}

} // namespace

std::unique_ptr<dependency::Provider> make_provider(const config::PipelineConfig& config) {
    const std::string& spec = config.dependency_provider;
    if (spec == "heuristic") {
        dependency::HeuristicLexicon lexicon =
            config.wordlists_dir.empty()
                ? dependency::HeuristicLexicon::defaults()
                : dependency::HeuristicLexicon::from_directory(config.wordlists_dir);
        return dependency::make_heuristic_provider(std::move(lexicon));
    }
    if (text::starts_with(spec, "conllu:")) {
        return dependency::make_conllu_provider(text::read_file(spec.substr(7)));
    }
    if (text::starts_with(spec, "remote:")) {
        return dependency::make_remote_provider(spec.substr(7));
    }
    throw ConfigError("unknown dependency provider: " + spec);
}

size_t cmd_ingest(const std::string& input_path, const std::string& store_path,
                  const config::PipelineConfig& config, std::ostream& out) {
    std::string content = text::read_file(input_path);
    std::string title = std::filesystem::path(input_path).stem().string();
    std::string body = content;
    std::string trimmed = text::trim(content);
    if (!trimmed.empty() && trimmed.front() == '{') {
        json obj;
        try {
            obj = json::parse(content);
        } catch (const json::parse_error& e) {
            throw InputError(std::string("structured input is not valid JSON: ") + e.what());
        }
        title = obj.value("title", title);
        if (!obj.contains("text")) {
            throw InputError("structured input must carry a \"text\" field");
        }
        body = obj["text"].get<std::string>();
    }

    corpus::Document doc = corpus::ingest(body, title, config.split);
    text::write_file(store_path, corpus::store_to_json(doc.paragraphs));
    out << "ingested \"" << title << "\": " << doc.paragraphs.size() << " paragraphs, "
        << total_tokens(doc.paragraphs) << " tokens -> " << store_path << "\n";
    return doc.paragraphs.size();
}

TokenizeOutcome cmd_tokenize(const std::string& store_path, const std::string& out_store_path,
                             const std::string& registry_path, const std::string& warnings_path,
                             const config::PipelineConfig& config, std::ostream& out) {
    corpus::Document doc = document_from_store(corpus::store_from_json(text::read_file(store_path)));

    TokenizeOutcome outcome;
    outcome.tokens_before = total_tokens(doc.paragraphs);

    tokenization::TokenRegistry registry;
    std::vector<tokenization::TokenizationWarning> warnings;

    if (config.definition_stage || config.dependency_stage) {
        std::unique_ptr<dependency::Provider> provider = make_provider(config);
        if (config.definition_stage) {
            std::vector<std::string> lexicon;
            if (!config.lexicon_path.empty()) {
                lexicon = tokenization::parse_lexicon(text::read_file(config.lexicon_path));
            }
            auto defs =
                tokenization::find_definitions(doc, config.definition_keywords, *provider);
            doc = tokenization::apply_definition_tokenization(doc, registry, defs, lexicon);
        }
        if (config.dependency_stage) {
            auto result = tokenization::apply_dependency_tokenization(doc, registry, *provider);
            doc = std::move(result.doc);
            warnings = std::move(result.warnings);
        }
    }

    outcome.tokens_after = total_tokens(doc.paragraphs);
    outcome.registry_size = registry.size();
    outcome.warning_count = warnings.size();

    text::write_file(out_store_path, corpus::store_to_json(doc.paragraphs));
    text::write_file(registry_path, registry.to_json());
    text::write_file(warnings_path, tokenization::warnings_to_jsonl(warnings));

    out << "tokenized " << doc.paragraphs.size() << " paragraphs: " << outcome.tokens_before
        << " -> " << outcome.tokens_after << " tokens (" << outcome.registry_size
        << " registry entries, " << outcome.warning_count << " warnings)\n";
    return outcome;
}

void cmd_index(const std::string& store_path, const std::string& index_path,
               const config::PipelineConfig& config, std::ostream& out) {
    std::vector<corpus::Paragraph> paragraphs =
        corpus::store_from_json(text::read_file(store_path));

    retrieval::TfidfConfig tfidf_config;
    tfidf_config.stopwords = config::load_stopwords(config);
    tfidf_config.soundex_enabled = config.soundex.enabled;
    tfidf_config.soundex_length = config.soundex.length;

    retrieval::TfidfIndex index = retrieval::build_tfidf(paragraphs, tfidf_config);
    retrieval::ParagraphVectorModel model = retrieval::train_pv(paragraphs, config.ranking.pv);
    text::write_file(index_path, retrieval::index_to_json(index, model));
    out << "indexed " << paragraphs.size() << " paragraphs (" << index.vocabulary.size()
        << " tf-idf terms, " << model.vocab.size() << " embedding terms) -> " << index_path
        << "\n";
}

namespace {

std::optional<tokenization::TokenRegistry> maybe_registry(const std::string& registry_path) {
    if (registry_path.empty() || !std::filesystem::exists(registry_path)) {
        return std::nullopt;
    }
    return tokenization::TokenRegistry::from_json(text::read_file(registry_path));
}

} // namespace

void cmd_rank(const std::string& index_path, const std::string& registry_path,
              const std::string& question, const config::PipelineConfig& config,
              std::ostream& out) {
    retrieval::TfidfIndex index;
    retrieval::ParagraphVectorModel model;
    retrieval::index_from_json(text::read_file(index_path), index, model);
    std::optional<tokenization::TokenRegistry> registry = maybe_registry(registry_path);

    retrieval::RankResult result =
        retrieval::rank(question, index, model, config.ranking.weight, config.ranking.top_k,
                        registry ? &*registry : nullptr);
    if (result.status == retrieval::RankStatus::TopKClamped) {
        out << "note: top_k exceeds the paragraph count; returning all paragraphs\n";
    }
    if (result.status == retrieval::RankStatus::NoMatch) {
        out << "no match: the question shares no signal with the corpus\n";
    }
    out << retrieval::ranked_to_json(result.items);
}

AskOutcome ask_question(const std::string& question, const std::vector<corpus::Paragraph>& store,
                        const retrieval::TfidfIndex& index,
                        const retrieval::ParagraphVectorModel& model,
                        const tokenization::TokenRegistry* registry,
                        const config::PipelineConfig& config) {
    retrieval::RankResult ranked = retrieval::rank(question, index, model, config.ranking.weight,
                                                   config.ranking.top_k, registry);
    if (ranked.items.empty()) {
        throw InputError("no paragraph matches the question");
    }

    std::string prepared_question =
        registry != nullptr ? tokenization::replace_registered(question, *registry)
                            : question;

    const size_t window = std::max<size_t>(
        1, static_cast<size_t>(static_cast<double>(config.chunking.window_size) *
                               config.chunking.margin));
    const size_t stride = std::min(config.chunking.stride, window);

    std::vector<chunking::Chunk> candidates;
    if (config.chunking.per_paragraph) {
        for (const retrieval::RankedParagraph& item : ranked.items) {
            auto pit = std::find_if(store.begin(), store.end(), [&](const corpus::Paragraph& p) {
                return p.id == item.paragraph_id;
            });
            if (pit == store.end()) {
                throw ValidationError("ranked paragraph " + item.paragraph_id +
                                      " is missing from the store");
            }
            std::vector<chunking::Chunk> chunks =
                chunking::sliding_window(pit->text, window, stride, pit->id);
            for (chunking::Chunk& c : chunks) {
                c.chunk_index = candidates.size();
                candidates.push_back(std::move(c));
            }
        }
    } else {
        // Join the top paragraphs in rank order, remembering each one's token
        // offset so chunks can be attributed back to a paragraph.
        std::string joined;
        std::vector<std::pair<size_t, std::string>> offsets; // first token -> paragraph id
        for (const retrieval::RankedParagraph& item : ranked.items) {
            auto pit = std::find_if(store.begin(), store.end(), [&](const corpus::Paragraph& p) {
                return p.id == item.paragraph_id;
            });
            if (pit == store.end()) {
                throw ValidationError("ranked paragraph " + item.paragraph_id +
                                      " is missing from the store");
            }
            if (!joined.empty()) {
                joined += "\n\n";
            }
            offsets.emplace_back(corpus::count_tokens(joined), pit->id);
            joined += pit->text;
        }
        candidates = chunking::sliding_window(joined, window, stride, ranked.items.front().paragraph_id);
        for (chunking::Chunk& c : candidates) {
            for (auto it = offsets.rbegin(); it != offsets.rend(); ++it) {
                if (c.token_start >= it->first) {
                    c.context_id = it->second;
                    break;
                }
            }
        }
    }

    qa::ClientConfig client;
    client.endpoint = config.qa_endpoint;
    client.timeout_seconds = config.qa_timeout_seconds;
    qa::Answer answer = qa::answer_question(prepared_question, candidates, client, registry);

    AskOutcome outcome;
    outcome.answer = answer.text;
    outcome.probability = answer.probability;
    outcome.source_paragraph = answer.source_paragraph;
    for (const retrieval::RankedParagraph& item : ranked.items) {
        if (item.paragraph_id == answer.source_paragraph) {
            outcome.source_score = item.score;
            break;
        }
    }
    return outcome;
}

void cmd_ask(const std::string& index_path, const std::string& store_path,
             const std::string& registry_path, const std::string& question,
             const config::PipelineConfig& config, std::ostream& out) {
    retrieval::TfidfIndex index;
    retrieval::ParagraphVectorModel model;
    retrieval::index_from_json(text::read_file(index_path), index, model);
    std::vector<corpus::Paragraph> store = corpus::store_from_json(text::read_file(store_path));
    std::optional<tokenization::TokenRegistry> registry = maybe_registry(registry_path);

    AskOutcome outcome = ask_question(question, store, index, model,
                                      registry ? &*registry : nullptr, config);
    json obj;
    obj["answer"] = outcome.answer;
    obj["probability"] = outcome.probability;
    obj["source_paragraph"] = outcome.source_paragraph;
    obj["source_score"] = outcome.source_score;
    out << obj.dump(2) << "\n";
}

void cmd_ask_batch(const std::string& index_path, const std::string& store_path,
                   const std::string& registry_path, const std::string& dataset_path,
                   const std::string& predictions_path, const config::PipelineConfig& config,
                   std::ostream& out) {
    retrieval::TfidfIndex index;
    retrieval::ParagraphVectorModel model;
    retrieval::index_from_json(text::read_file(index_path), index, model);
    std::vector<corpus::Paragraph> store = corpus::store_from_json(text::read_file(store_path));
    std::optional<tokenization::TokenRegistry> registry = maybe_registry(registry_path);

    eval::Dataset dataset = eval::load_dataset(text::read_file(dataset_path));
    json predictions = json::object();
    for (const eval::QaExample& ex : dataset.examples) {
        AskOutcome outcome = ask_question(ex.question, store, index, model,
                                          registry ? &*registry : nullptr, config);
        predictions[ex.id] = outcome.answer;
    }
    text::write_file(predictions_path, predictions.dump(2) + "\n");
    out << "answered " << dataset.examples.size() << " questions -> " << predictions_path
        << "\n";
}

void cmd_eval(const std::string& dataset_path,
              const std::vector<std::string>& labeled_predictions,
              const std::string& q_scores_path, const std::string& report_path,
              std::ostream& out) {
    eval::Dataset dataset = eval::load_dataset(text::read_file(dataset_path));
    std::map<std::string, int> q_scores;
    if (!q_scores_path.empty()) {
        q_scores = eval::load_q_scores(text::read_file(q_scores_path));
    }

    eval::ReportRow row;
    row.document = dataset.title.empty() ? dataset_path : dataset.title;
    row.size_words = dataset.size_words;
    row.num_questions = dataset.examples.size();
    for (const std::string& spec : labeled_predictions) {
        size_t eq = spec.find('=');
        std::string label = eq == std::string::npos ? "system" : spec.substr(0, eq);
        std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
        auto predictions = eval::load_predictions(text::read_file(path));
        row.systems.push_back(eval::evaluate_run(dataset.examples, predictions, q_scores, label));
    }

    std::vector<eval::ReportRow> rows{row};
    if (!report_path.empty()) {
        text::write_file(report_path, eval::report_to_json(rows));
    }
    out << eval::report_to_table(rows);
}

} // namespace docqa::commands
