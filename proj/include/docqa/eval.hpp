#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace docqa::eval {

struct QaExample {
    std::string id;
    std::string question;
    std::string context_ref; // paragraph/document reference
    std::vector<std::string> gold_answers;
};

struct Scores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalRecord {
    std::string example_id;
    std::string predicted;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::optional<int> q_score;
    std::optional<double> q_normalized;
};

// Answer normalization shared by both sides of the comparison: casefold,
// strip punctuation, collapse whitespace, drop the articles a/an/the.
std::vector<std::string> normalize_answer(std::string_view s);

// Token-level F1 over the multiset overlap of normalized tokens. 0/0 counts
// as 0, except when both token lists are empty (then all three are 1).
Scores token_f1(std::string_view predicted, std::string_view gold);

// The triple maximizing f1 across the gold answers.
Scores best_gold_f1(std::string_view predicted, const std::vector<std::string>& golds);

// (q - 1) / 2 for q in {1, 2, 3}; anything else is an ArgumentError.
double normalize_q(int q);

struct RunReport {
    std::string system_label;
    std::vector<EvalRecord> records;
    double mean_f1 = 0.0;
    std::optional<double> mean_q_normalized; // mean over examples carrying a Q score
};

// Scores one system's predictions over the example set. Examples without a
// prediction are scored against the empty string; prediction ids that match
// no example are a ValidationError listing the offenders.
RunReport evaluate_run(const std::vector<QaExample>& examples,
                       const std::map<std::string, std::string>& predictions,
                       const std::map<std::string, int>& q_scores = {},
                       std::string_view system_label = "system");

// Row of the comparison table: one document, one column group per system.
struct ReportRow {
    std::string document;
    size_t size_words = 0;
    size_t num_questions = 0;
    std::vector<RunReport> systems;
};

std::string report_to_json(const std::vector<ReportRow>& rows);
std::string report_to_table(const std::vector<ReportRow>& rows);

// Dataset file in the usual extractive-QA JSON layout:
// {"data":[{"title","paragraphs":[{"context","qas":[{"id","question",
// "answers":[{"text"}]}]}]}]}.
struct Dataset {
    std::string title;
    size_t size_words = 0;
    std::vector<QaExample> examples;
};

Dataset load_dataset(const std::string& json_text);
std::map<std::string, std::string> load_predictions(const std::string& json_text);
std::map<std::string, int> load_q_scores(const std::string& json_text);

} // namespace docqa::eval
