#pragma once

#include "docqa/config.hpp"
#include "docqa/corpus.hpp"
#include "docqa/retrieval.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace docqa::commands {

// Splits an input document (plain text or {"title","text"} JSON) and writes
// the paragraph store. Returns the paragraph count.
size_t cmd_ingest(const std::string& input_path, const std::string& store_path,
                  const config::PipelineConfig& config, std::ostream& out);

struct TokenizeOutcome {
    size_t tokens_before = 0;
    size_t tokens_after = 0;
    size_t registry_size = 0;
    size_t warning_count = 0;
};

// Definition tokenization first, then dependency grouping; writes the
// tokenized store, the registry and the warnings report.
TokenizeOutcome cmd_tokenize(const std::string& store_path, const std::string& out_store_path,
                             const std::string& registry_path, const std::string& warnings_path,
                             const config::PipelineConfig& config, std::ostream& out);

// Builds the tf-idf index and trains paragraph vectors over a store.
void cmd_index(const std::string& store_path, const std::string& index_path,
               const config::PipelineConfig& config, std::ostream& out);

// Ranks paragraphs for a question; prints a JSON array of ranked items.
void cmd_rank(const std::string& index_path, const std::string& registry_path,
              const std::string& question, const config::PipelineConfig& config,
              std::ostream& out);

struct AskOutcome {
    std::string answer;
    double probability = 0.0;
    std::string source_paragraph;
    double source_score = 0.0;
};

// Full pipeline for one question: rank, tokenize the question, window the
// top paragraphs, query the QA backend, detokenize.
AskOutcome ask_question(const std::string& question, const std::vector<corpus::Paragraph>& store,
                        const retrieval::TfidfIndex& index,
                        const retrieval::ParagraphVectorModel& model,
                        const tokenization::TokenRegistry* registry,
                        const config::PipelineConfig& config);

void cmd_ask(const std::string& index_path, const std::string& store_path,
             const std::string& registry_path, const std::string& question,
             const config::PipelineConfig& config, std::ostream& out);

// Batch mode: answers every question of a dataset file and writes a
// predictions map (id -> answer).
void cmd_ask_batch(const std::string& index_path, const std::string& store_path,
                   const std::string& registry_path, const std::string& dataset_path,
                   const std::string& predictions_path, const config::PipelineConfig& config,
                   std::ostream& out);

// Scores one or more systems ("label=predictions.json") against a dataset.
void cmd_eval(const std::string& dataset_path,
              const std::vector<std::string>& labeled_predictions,
              const std::string& q_scores_path, const std::string& report_path,
              std::ostream& out);

std::unique_ptr<dependency::Provider> make_provider(const config::PipelineConfig& config);

} // namespace docqa::commands
