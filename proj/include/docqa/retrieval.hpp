#pragma once

#include "docqa/corpus.hpp"
#include "docqa/tokenization.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace docqa::retrieval {

// Sparse L2-normalized row: (column, weight) pairs sorted by column.
using SparseVector = std::vector<std::pair<int, double>>;

struct TfidfConfig {
    std::vector<std::string> stopwords; // empty -> built-in default list
    bool use_default_stopwords = true;  // false + empty list -> no stopwords
    bool soundex_enabled = false;
    size_t soundex_length = 6;
};

std::vector<std::string> default_stopwords();

// tf-idf with raw term frequency and smoothed log idf:
//   weight(t, p) = tf(t, p) * (ln((1 + N) / (1 + df(t))) + 1)
// rows L2-normalized. Terms are casefolded words minus stopwords,
// soundex-encoded when enabled. The vocabulary is sorted, so the index is
// independent of paragraph input order.
struct TfidfIndex {
    std::vector<std::string> vocabulary; // column -> term
    std::map<std::string, int> term_columns;
    std::vector<int> doc_freq; // by column
    std::vector<SparseVector> vectors;
    std::vector<std::string> paragraph_ids;
    bool soundex_enabled = false;
    size_t soundex_length = 6;
    std::vector<std::string> stopwords;

    // Paragraphs with no in-vocabulary terms keep an empty (zero) vector.
    bool zero_vector(size_t i) const { return vectors[i].empty(); }
};

TfidfIndex build_tfidf(const std::vector<corpus::Paragraph>& paragraphs,
                       const TfidfConfig& config = {});

// Query-side vector through the same term pipeline, weighted with the
// index's idf and L2-normalized. Out-of-vocabulary terms are dropped.
SparseVector query_vector(const TfidfIndex& index, std::string_view text);

double sparse_cosine(const SparseVector& a, const SparseVector& b);

// ---------------------------------------------------------------------------
// Paragraph vectors (distributed bag of words)
// ---------------------------------------------------------------------------

struct PvHyperparams {
    int dim = 64;
    int epochs = 40;
    int window = 5; // kept for interface parity; the bag-of-words flavor ignores it
    int negative_samples = 5;
    double initial_learning_rate = 0.025;
    int min_count = 2;
    uint64_t seed = 42;
};

// Doc and word matrices are dim x D and dim x V; training is sequential and
// bit-reproducible for a fixed seed.
struct ParagraphVectorModel {
    PvHyperparams hyperparams;
    std::vector<std::string> vocab; // term id -> term
    std::map<std::string, int> term_ids;
    std::vector<std::string> paragraph_ids;
    Eigen::MatrixXd doc_vectors;
    Eigen::MatrixXd word_vectors;
};

// Trains paragraph vectors: per epoch, per paragraph, each kept word is
// scored against the paragraph vector with negative sampling under logistic
// loss, SGD with a linearly decayed learning rate.
ParagraphVectorModel train_pv(const std::vector<corpus::Paragraph>& paragraphs,
                              const PvHyperparams& hyperparams = {});

struct InferredVector {
    Eigen::VectorXd vector;
    bool no_signal = false; // no in-vocabulary words in the text
};

// Optimizes a fresh document vector against frozen word vectors for the
// model's epoch count. Deterministic for a fixed model seed and text.
InferredVector infer_pv(const ParagraphVectorModel& model, std::string_view text);

double dense_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// ---------------------------------------------------------------------------
// Hybrid ranking
// ---------------------------------------------------------------------------

struct RankedParagraph {
    std::string paragraph_id;
    double tfidf_sim = 0.0; // cosine clamped to [0, 1]
    double pv_sim = 0.0;    // (cosine + 1) / 2
    double score = 0.0;     // weight * pv_sim + (1 - weight) * tfidf_sim
    size_t rank = 0;
};

enum class RankStatus {
    Ok,
    TopKClamped, // top_k exceeded the paragraph count; everything returned
    NoMatch,     // the question carried no signal on either channel
};

struct RankResult {
    std::vector<RankedParagraph> items;
    RankStatus status = RankStatus::Ok;
};

// Blends both channels; ties break by ascending paragraph id. The question
// passes through the registry (canonical phrase replacement) when one is
// given, and through the index's soundex setting always.
RankResult rank(std::string_view question, const TfidfIndex& index,
                const ParagraphVectorModel& model, double weight, size_t top_k,
                const tokenization::TokenRegistry* registry = nullptr);

std::string ranked_to_json(const std::vector<RankedParagraph>& items);

// Index file: JSON with a format_version field; loading any other version
// fails loudly.
std::string index_to_json(const TfidfIndex& index, const ParagraphVectorModel& model);
void index_from_json(const std::string& json_text, TfidfIndex& index,
                     ParagraphVectorModel& model);

} // namespace docqa::retrieval
