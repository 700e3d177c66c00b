#pragma once

#include "docqa/corpus.hpp"
#include "docqa/retrieval.hpp"

#include <set>
#include <string>

namespace docqa::config {

// Mirrors the structured config file (JSON, --config). Every field has a
// usable default so the pipeline runs with no file at all.
struct PipelineConfig {
    corpus::SplitConfig split;

    std::set<std::string> definition_keywords;
    std::string lexicon_path;

    // "heuristic", "conllu:<path>" or "remote:<endpoint>".
    std::string dependency_provider = "heuristic";
    bool definition_stage = true;
    bool dependency_stage = true;

    struct {
        bool enabled = false;
        size_t length = 6;
    } soundex;

    struct {
        double weight = 0.5;
        size_t top_k = 3;
        retrieval::PvHyperparams pv;
    } ranking;

    struct {
        size_t window_size = 384;
        size_t stride = 128;
        // Shrinks the effective window to leave subword headroom for the
        // backend model (the toolkit counts whitespace tokens, not subwords).
        double margin = 0.7;
        bool per_paragraph = false;
    } chunking;

    std::string qa_endpoint;
    int qa_timeout_seconds = 30;

    std::string stopwords_path;
    std::string wordlists_dir;

    struct {
        std::string store;
        std::string tokenized_store;
        std::string registry;
        std::string warnings;
        std::string index;
        std::string report;
    } paths;

    PipelineConfig();
};

PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::string& path);

// Throws ConfigError when bounds are violated (weight outside [0,1],
// min_tokens >= max_tokens, stride > window_size, soundex length < 4).
void validate(const PipelineConfig& config);

std::vector<std::string> load_stopwords(const PipelineConfig& config);

} // namespace docqa::config
