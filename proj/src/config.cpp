#include "docqa/config.hpp"

#include "docqa/errors.hpp"
#include "docqa/text.hpp"
#include "docqa/tokenization.hpp"

#include <nlohmann/json.hpp>

#include <sstream>

namespace docqa::config {

using json = nlohmann::json;

PipelineConfig::PipelineConfig() {
    split.hierarchy_patterns = corpus::default_hierarchy_patterns();
    definition_keywords = tokenization::default_definition_keywords();
}

namespace {

template <typename T>
void read_into(const json& obj, const char* key, T& target) {
    if (obj.contains(key)) {
        target = obj.at(key).get<T>();
    }
}

} // namespace

PipelineConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }

    PipelineConfig cfg;
    if (root.contains("split")) {
        const json& s = root["split"];
        read_into(s, "hierarchy_patterns", cfg.split.hierarchy_patterns);
        read_into(s, "min_tokens", cfg.split.min_tokens);
        read_into(s, "max_tokens", cfg.split.max_tokens);
        read_into(s, "merge_short", cfg.split.merge_short);
        read_into(s, "headings_in_text", cfg.split.headings_in_text);
        read_into(s, "abbreviations", cfg.split.abbreviations);
    }
    if (root.contains("definition_keywords")) {
        cfg.definition_keywords.clear();
        for (const json& k : root["definition_keywords"]) {
            cfg.definition_keywords.insert(k.get<std::string>());
        }
    }
    read_into(root, "lexicon_path", cfg.lexicon_path);
    read_into(root, "dependency_provider", cfg.dependency_provider);
    if (root.contains("stages")) {
        read_into(root["stages"], "definitions", cfg.definition_stage);
        read_into(root["stages"], "dependencies", cfg.dependency_stage);
    }
    if (root.contains("soundex")) {
        read_into(root["soundex"], "enabled", cfg.soundex.enabled);
        read_into(root["soundex"], "length", cfg.soundex.length);
    }
    if (root.contains("ranking")) {
        const json& r = root["ranking"];
        read_into(r, "weight", cfg.ranking.weight);
        read_into(r, "top_k", cfg.ranking.top_k);
        if (r.contains("pv")) {
            const json& pv = r["pv"];
            read_into(pv, "dim", cfg.ranking.pv.dim);
            read_into(pv, "epochs", cfg.ranking.pv.epochs);
            read_into(pv, "window", cfg.ranking.pv.window);
            read_into(pv, "negative_samples", cfg.ranking.pv.negative_samples);
            read_into(pv, "initial_learning_rate", cfg.ranking.pv.initial_learning_rate);
            read_into(pv, "min_count", cfg.ranking.pv.min_count);
            read_into(pv, "seed", cfg.ranking.pv.seed);
        }
    }
    if (root.contains("chunking")) {
        const json& c = root["chunking"];
        read_into(c, "window_size", cfg.chunking.window_size);
        read_into(c, "stride", cfg.chunking.stride);
        read_into(c, "margin", cfg.chunking.margin);
        read_into(c, "per_paragraph", cfg.chunking.per_paragraph);
    }
    read_into(root, "qa_endpoint", cfg.qa_endpoint);
    read_into(root, "qa_timeout_seconds", cfg.qa_timeout_seconds);
    read_into(root, "stopwords_path", cfg.stopwords_path);
    read_into(root, "wordlists_dir", cfg.wordlists_dir);
    if (root.contains("paths")) {
        const json& p = root["paths"];
        read_into(p, "store", cfg.paths.store);
        read_into(p, "tokenized_store", cfg.paths.tokenized_store);
        read_into(p, "registry", cfg.paths.registry);
        read_into(p, "warnings", cfg.paths.warnings);
        read_into(p, "index", cfg.paths.index);
        read_into(p, "report", cfg.paths.report);
    }
    validate(cfg);
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    return parse_config(text::read_file(path));
}

void validate(const PipelineConfig& cfg) {
    if (cfg.split.min_tokens == 0 || cfg.split.min_tokens >= cfg.split.max_tokens) {
        throw ConfigError("split.min_tokens must be positive and smaller than split.max_tokens");
    }
    if (cfg.ranking.weight < 0.0 || cfg.ranking.weight > 1.0) {
        throw ConfigError("ranking.weight must lie in [0, 1]");
    }
    if (cfg.ranking.top_k == 0) {
        throw ConfigError("ranking.top_k must be positive");
    }
    if (cfg.soundex.length < 4) {
        throw ConfigError("soundex.length must be at least 4");
    }
    if (cfg.chunking.stride == 0 || cfg.chunking.stride > cfg.chunking.window_size) {
        throw ConfigError("chunking.stride must lie in [1, window_size]");
    }
    if (cfg.chunking.margin <= 0.0 || cfg.chunking.margin > 1.0) {
        throw ConfigError("chunking.margin must lie in (0, 1]");
    }
    if (cfg.dependency_provider != "heuristic" &&
        !text::starts_with(cfg.dependency_provider, "conllu:") &&
        !text::starts_with(cfg.dependency_provider, "remote:")) {
        throw ConfigError("dependency_provider must be heuristic, conllu:<path> or "
                          "remote:<endpoint>");
    }
}

std::vector<std::string> load_stopwords(const PipelineConfig& config) {
    if (config.stopwords_path.empty()) {
        return {};
    }
    std::vector<std::string> words;
    std::istringstream in(text::read_file(config.stopwords_path));
    std::string line;
    while (std::getline(in, line)) {
        std::string w = text::trim(line);
        if (!w.empty() && w[0] != '#') {
            words.push_back(text::casefold(w));
        }
    }
    return words;
}

} // namespace docqa::config
