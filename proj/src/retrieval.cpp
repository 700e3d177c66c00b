#include "docqa/retrieval.hpp"

#include "docqa/errors.hpp"
#include "docqa/phonetics.hpp"
#include "docqa/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>

namespace docqa::retrieval {

using json = nlohmann::ordered_json;

std::vector<std::string> default_stopwords() {
    return {"a",    "an",   "and",  "are",  "as",   "at",   "be",    "by",   "for",
            "from", "has",  "have", "in",   "is",   "it",   "its",   "of",   "on",
            "or",   "such", "that", "the",  "their","then", "there", "these","they",
            "this", "to",   "was",  "were", "which","will", "with"};
}

namespace {

std::vector<std::string> tfidf_terms(std::string_view text_in,
                                     const std::vector<std::string>& stopwords,
                                     bool soundex_enabled, size_t soundex_length) {
    std::vector<std::string> terms;
    for (const std::string& w : text::words(text::casefold(text_in))) {
        if (std::find(stopwords.begin(), stopwords.end(), w) == stopwords.end()) {
            terms.push_back(w);
        }
    }
    if (soundex_enabled) {
        // Only purely alphabetic terms are misspellable words; numbers,
        // section ids and registry token symbols (x1x8) must stay distinct,
        // not collapse onto a shared phonetic code.
        for (std::string& t : terms) {
            bool alphabetic = !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) {
                return std::isalpha(c) != 0;
            });
            if (alphabetic) {
                t = phonetics::soundex(t, soundex_length);
            }
        }
    }
    return terms;
}

void l2_normalize(SparseVector& v) {
    double norm_sq = 0.0;
    for (const auto& [col, w] : v) {
        norm_sq += w * w;
    }
    if (norm_sq <= 0.0) {
        v.clear();
        return;
    }
    double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& [col, w] : v) {
        w *= inv;
    }
}

} // namespace

TfidfIndex build_tfidf(const std::vector<corpus::Paragraph>& paragraphs,
                       const TfidfConfig& config) {
    if (paragraphs.empty()) {
        throw ArgumentError("cannot build a tf-idf index over an empty corpus");
    }
    TfidfIndex index;
    index.soundex_enabled = config.soundex_enabled;
    index.soundex_length = config.soundex_length;
    index.stopwords = config.stopwords.empty() && config.use_default_stopwords
                          ? default_stopwords()
                          : config.stopwords;

    std::vector<std::vector<std::string>> per_doc_terms;
    per_doc_terms.reserve(paragraphs.size());
    std::map<std::string, int> df;
    for (const corpus::Paragraph& p : paragraphs) {
        std::vector<std::string> terms =
            tfidf_terms(p.text, index.stopwords, index.soundex_enabled, index.soundex_length);
        std::vector<std::string> unique = terms;
        std::sort(unique.begin(), unique.end());
        unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
        for (const std::string& t : unique) {
            ++df[t];
        }
        per_doc_terms.push_back(std::move(terms));
        index.paragraph_ids.push_back(p.id);
    }

    // Sorted vocabulary keeps column ids independent of paragraph order.
    for (const auto& [term, freq] : df) {
        index.term_columns[term] = static_cast<int>(index.vocabulary.size());
        index.vocabulary.push_back(term);
        index.doc_freq.push_back(freq);
    }

    const double n_docs = static_cast<double>(paragraphs.size());
    index.vectors.reserve(paragraphs.size());
    for (const std::vector<std::string>& terms : per_doc_terms) {
        std::map<int, double> counts;
        for (const std::string& t : terms) {
            ++counts[index.term_columns.at(t)];
        }
        SparseVector vec;
        vec.reserve(counts.size());
        for (const auto& [col, tf] : counts) {
            double idf = std::log((1.0 + n_docs) / (1.0 + index.doc_freq[col])) + 1.0;
            vec.emplace_back(col, tf * idf);
        }
        l2_normalize(vec);
        index.vectors.push_back(std::move(vec));
    }
    return index;
}

SparseVector query_vector(const TfidfIndex& index, std::string_view text_in) {
    std::vector<std::string> terms =
        tfidf_terms(text_in, index.stopwords, index.soundex_enabled, index.soundex_length);
    std::map<int, double> counts;
    for (const std::string& t : terms) {
        auto it = index.term_columns.find(t);
        if (it != index.term_columns.end()) {
            ++counts[it->second];
        }
    }
    const double n_docs = static_cast<double>(index.paragraph_ids.size());
    SparseVector vec;
    vec.reserve(counts.size());
    for (const auto& [col, tf] : counts) {
        double idf = std::log((1.0 + n_docs) / (1.0 + index.doc_freq[col])) + 1.0;
        vec.emplace_back(col, tf * idf);
    }
    l2_normalize(vec);
    return vec;
}

double sparse_cosine(const SparseVector& a, const SparseVector& b) {
    double dot = 0.0;
    size_t i = 0;
    size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) {
            ++i;
        } else if (a[i].first > b[j].first) {
            ++j;
        } else {
            dot += a[i].second * b[j].second;
            ++i;
            ++j;
        }
    }
    return dot; // inputs are L2-normalized (or zero)
}

// ---------------------------------------------------------------------------
// Paragraph vectors
// ---------------------------------------------------------------------------

namespace {

// Deterministic uniform double in [0, 1) independent of library
// distribution internals.
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

double sigmoid(double x) {
    if (x > 8.0) {
        return 1.0;
    }
    if (x < -8.0) {
        return 0.0;
    }
    return 1.0 / (1.0 + std::exp(-x));
}

struct NoiseTable {
    std::vector<double> cumulative; // by term id, normalized to 1

    explicit NoiseTable(const std::vector<int64_t>& counts) {
        cumulative.resize(counts.size());
        double total = 0.0;
        for (size_t i = 0; i < counts.size(); ++i) {
            total += std::pow(static_cast<double>(counts[i]), 0.75);
            cumulative[i] = total;
        }
        for (double& c : cumulative) {
            c /= total;
        }
    }

    int sample(std::mt19937_64& rng) const {
        double u = next_uniform(rng);
        auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        return static_cast<int>(std::min<size_t>(
            static_cast<size_t>(it - cumulative.begin()), cumulative.size() - 1));
    }
};

std::vector<std::string> pv_words(std::string_view text_in) {
    return text::words(text::casefold(text_in));
}

// One positive pair plus negatives; updates `doc` (and the word matrix when
// `update_words` is set). Classic negative-sampling step.
void train_pair(Eigen::Ref<Eigen::VectorXd> doc, Eigen::MatrixXd& word_vectors, int word_id,
                const NoiseTable& noise, int negatives, double lr, std::mt19937_64& rng,
                bool update_words) {
    Eigen::VectorXd accum = Eigen::VectorXd::Zero(doc.size());
    for (int k = 0; k <= negatives; ++k) {
        int target = word_id;
        double label = 1.0;
        if (k > 0) {
            target = noise.sample(rng);
            if (target == word_id) {
                continue;
            }
            label = 0.0;
        }
        auto col = word_vectors.col(target);
        double f = sigmoid(doc.dot(col));
        double g = (label - f) * lr;
        accum += g * col;
        if (update_words) {
            col += g * doc;
        }
    }
    doc += accum;
}

} // namespace

ParagraphVectorModel train_pv(const std::vector<corpus::Paragraph>& paragraphs,
                              const PvHyperparams& hyperparams) {
    if (paragraphs.size() < 2) {
        throw ArgumentError("paragraph-vector training requires at least 2 paragraphs");
    }
    if (hyperparams.dim < 2) {
        throw ArgumentError("paragraph-vector dimension must be at least 2");
    }

    ParagraphVectorModel model;
    model.hyperparams = hyperparams;

    std::map<std::string, int64_t> counts;
    std::vector<std::vector<std::string>> doc_words;
    doc_words.reserve(paragraphs.size());
    for (const corpus::Paragraph& p : paragraphs) {
        doc_words.push_back(pv_words(p.text));
        for (const std::string& w : doc_words.back()) {
            ++counts[w];
        }
        model.paragraph_ids.push_back(p.id);
    }
    std::vector<int64_t> vocab_counts;
    for (const auto& [term, count] : counts) {
        if (count >= hyperparams.min_count) {
            model.term_ids[term] = static_cast<int>(model.vocab.size());
            model.vocab.push_back(term);
            vocab_counts.push_back(count);
        }
    }
    if (model.vocab.empty()) {
        throw InputError("corpus vocabulary is empty after min_count filtering");
    }

    const int dim = hyperparams.dim;
    const size_t n_docs = paragraphs.size();
    std::mt19937_64 rng(hyperparams.seed);

    model.doc_vectors.resize(dim, static_cast<Eigen::Index>(n_docs));
    for (Eigen::Index d = 0; d < model.doc_vectors.cols(); ++d) {
        for (int r = 0; r < dim; ++r) {
            model.doc_vectors(r, d) = (next_uniform(rng) - 0.5) / dim;
        }
    }
    // Word vectors start random as well: at desk-scale corpora a zero start
    // leaves every document riding the same early gradient direction.
    model.word_vectors.resize(dim, static_cast<Eigen::Index>(model.vocab.size()));
    for (Eigen::Index c = 0; c < model.word_vectors.cols(); ++c) {
        for (int r = 0; r < dim; ++r) {
            model.word_vectors(r, c) = (next_uniform(rng) - 0.5) / dim;
        }
    }

    // Kept word ids per document, in text order.
    std::vector<std::vector<int>> kept(n_docs);
    size_t total_words = 0;
    for (size_t d = 0; d < n_docs; ++d) {
        for (const std::string& w : doc_words[d]) {
            auto it = model.term_ids.find(w);
            if (it != model.term_ids.end()) {
                kept[d].push_back(it->second);
            }
        }
        total_words += kept[d].size();
    }

    NoiseTable noise(vocab_counts);
    const double total_steps =
        std::max<double>(1.0, static_cast<double>(hyperparams.epochs) *
                                  static_cast<double>(total_words));
    size_t step = 0;
    for (int epoch = 0; epoch < hyperparams.epochs; ++epoch) {
        for (size_t d = 0; d < n_docs; ++d) {
            auto doc = model.doc_vectors.col(static_cast<Eigen::Index>(d));
            for (int word_id : kept[d]) {
                double progress = static_cast<double>(step) / total_steps;
                double lr = hyperparams.initial_learning_rate *
                            std::max(1.0 - progress, 1e-4);
                train_pair(doc, model.word_vectors, word_id, noise,
                           hyperparams.negative_samples, lr, rng, /*update_words=*/true);
                ++step;
            }
        }
    }
    return model;
}

InferredVector infer_pv(const ParagraphVectorModel& model, std::string_view text_in) {
    const int dim = model.hyperparams.dim;
    InferredVector out;
    out.vector = Eigen::VectorXd::Zero(dim);

    std::vector<int> kept;
    for (const std::string& w : pv_words(text_in)) {
        auto it = model.term_ids.find(w);
        if (it != model.term_ids.end()) {
            kept.push_back(it->second);
        }
    }
    if (kept.empty()) {
        out.no_signal = true;
        return out;
    }

    std::mt19937_64 rng(model.hyperparams.seed ^ text::fnv1a(text_in));
    for (int r = 0; r < dim; ++r) {
        out.vector(r) = (next_uniform(rng) - 0.5) / dim;
    }
    Eigen::MatrixXd frozen = model.word_vectors; // word side stays fixed
    const double total_steps = std::max<double>(
        1.0, static_cast<double>(model.hyperparams.epochs) * static_cast<double>(kept.size()));
    size_t step = 0;
    for (int epoch = 0; epoch < model.hyperparams.epochs; ++epoch) {
        for (int word_id : kept) {
            double progress = static_cast<double>(step) / total_steps;
            double lr = model.hyperparams.initial_learning_rate * std::max(1.0 - progress, 1e-4);
            // Negative samples draw from the uniform vocabulary: the trained
            // noise distribution is not persisted with the model.
            for (int k = 0; k <= model.hyperparams.negative_samples; ++k) {
                int target = word_id;
                double label = 1.0;
                if (k > 0) {
                    target = static_cast<int>(rng() % model.vocab.size());
                    if (target == word_id) {
                        continue;
                    }
                    label = 0.0;
                }
                auto col = frozen.col(target);
                double f = sigmoid(out.vector.dot(col));
                double g = (label - f) * lr;
                out.vector += g * col;
            }
            ++step;
        }
    }
    return out;
}

double dense_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double na = a.norm();
    double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return a.dot(b) / (na * nb);
}

// ---------------------------------------------------------------------------
// Ranking
// ---------------------------------------------------------------------------

RankResult rank(std::string_view question, const TfidfIndex& index,
                const ParagraphVectorModel& model, double weight, size_t top_k,
                const tokenization::TokenRegistry* registry) {
    if (question.empty()) {
        throw ArgumentError("question must be non-empty");
    }
    if (weight < 0.0 || weight > 1.0) {
        throw ArgumentError("weight must lie in [0, 1]");
    }
    if (top_k == 0) {
        throw ArgumentError("top_k must be positive");
    }
    if (index.paragraph_ids != model.paragraph_ids) {
        throw ValidationError("index and model cover different paragraph sets");
    }

    std::string prepared =
        registry != nullptr ? tokenization::replace_registered(question, *registry)
                            : std::string(question);

    SparseVector qvec = query_vector(index, prepared);
    InferredVector qemb = infer_pv(model, prepared);
    if (qvec.empty() && qemb.no_signal) {
        return {{}, RankStatus::NoMatch};
    }

    const size_t n = index.paragraph_ids.size();
    std::vector<RankedParagraph> items(n);
    for (size_t i = 0; i < n; ++i) {
        RankedParagraph& item = items[i];
        item.paragraph_id = index.paragraph_ids[i];
        item.tfidf_sim = std::clamp(sparse_cosine(qvec, index.vectors[i]), 0.0, 1.0);
        double cos = dense_cosine(qemb.vector, model.doc_vectors.col(static_cast<Eigen::Index>(i)));
        item.pv_sim = std::clamp((cos + 1.0) / 2.0, 0.0, 1.0);
        item.score = weight * item.pv_sim + (1.0 - weight) * item.tfidf_sim;
    }
    std::sort(items.begin(), items.end(), [](const RankedParagraph& a, const RankedParagraph& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.paragraph_id < b.paragraph_id;
    });

    RankResult result;
    result.status = top_k > n ? RankStatus::TopKClamped : RankStatus::Ok;
    size_t keep = std::min(top_k, n);
    items.resize(keep);
    for (size_t i = 0; i < keep; ++i) {
        items[i].rank = i + 1;
    }
    result.items = std::move(items);
    return result;
}

std::string ranked_to_json(const std::vector<RankedParagraph>& items) {
    json arr = json::array();
    for (const RankedParagraph& item : items) {
        json obj;
        obj["paragraph_id"] = item.paragraph_id;
        obj["tfidf_sim"] = item.tfidf_sim;
        obj["pv_sim"] = item.pv_sim;
        obj["score"] = item.score;
        obj["rank"] = item.rank;
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {
constexpr int kIndexFormatVersion = 1;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json arr = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        json col = json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            col.push_back(m(r, c));
        }
        arr.push_back(std::move(col));
    }
    return arr;
}

Eigen::MatrixXd matrix_from_json(const json& arr, int dim) {
    Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(arr.size()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const json& col = arr[static_cast<size_t>(c)];
        if (static_cast<int>(col.size()) != dim) {
            throw ValidationError("vector dimension mismatch in index file");
        }
        for (Eigen::Index r = 0; r < dim; ++r) {
            m(r, c) = col[static_cast<size_t>(r)].get<double>();
        }
    }
    return m;
}

} // namespace

std::string index_to_json(const TfidfIndex& index, const ParagraphVectorModel& model) {
    json root;
    root["format_version"] = kIndexFormatVersion;

    json tfidf;
    tfidf["vocabulary"] = index.vocabulary;
    tfidf["doc_freq"] = index.doc_freq;
    tfidf["paragraph_ids"] = index.paragraph_ids;
    tfidf["soundex_enabled"] = index.soundex_enabled;
    tfidf["soundex_length"] = index.soundex_length;
    tfidf["stopwords"] = index.stopwords;
    json vectors = json::array();
    for (const SparseVector& vec : index.vectors) {
        json row = json::array();
        for (const auto& [col, w] : vec) {
            row.push_back(json::array({col, w}));
        }
        vectors.push_back(std::move(row));
    }
    tfidf["vectors"] = std::move(vectors);
    root["tfidf"] = std::move(tfidf);

    json pv;
    pv["dim"] = model.hyperparams.dim;
    pv["epochs"] = model.hyperparams.epochs;
    pv["window"] = model.hyperparams.window;
    pv["negative_samples"] = model.hyperparams.negative_samples;
    pv["initial_learning_rate"] = model.hyperparams.initial_learning_rate;
    pv["min_count"] = model.hyperparams.min_count;
    pv["seed"] = model.hyperparams.seed;
    pv["vocab"] = model.vocab;
    pv["paragraph_ids"] = model.paragraph_ids;
    pv["doc_vectors"] = matrix_to_json(model.doc_vectors);
    pv["word_vectors"] = matrix_to_json(model.word_vectors);
    root["pv"] = std::move(pv);

    return root.dump() + "\n";
}

void index_from_json(const std::string& json_text, TfidfIndex& index,
                     ParagraphVectorModel& model) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("index file is not valid JSON: ") + e.what());
    }
    int version = root.value("format_version", -1);
    if (version != kIndexFormatVersion) {
        throw ValidationError("index file format_version " + std::to_string(version) +
                              " is not supported (expected " +
                              std::to_string(kIndexFormatVersion) + ")");
    }

    const json& tfidf = root.at("tfidf");
    index = TfidfIndex{};
    index.vocabulary = tfidf.at("vocabulary").get<std::vector<std::string>>();
    index.doc_freq = tfidf.at("doc_freq").get<std::vector<int>>();
    index.paragraph_ids = tfidf.at("paragraph_ids").get<std::vector<std::string>>();
    index.soundex_enabled = tfidf.at("soundex_enabled").get<bool>();
    index.soundex_length = tfidf.at("soundex_length").get<size_t>();
    index.stopwords = tfidf.at("stopwords").get<std::vector<std::string>>();
    for (size_t i = 0; i < index.vocabulary.size(); ++i) {
        index.term_columns[index.vocabulary[i]] = static_cast<int>(i);
    }
    for (const json& row : tfidf.at("vectors")) {
        SparseVector vec;
        for (const json& pair : row) {
            vec.emplace_back(pair[0].get<int>(), pair[1].get<double>());
        }
        index.vectors.push_back(std::move(vec));
    }

    const json& pv = root.at("pv");
    model = ParagraphVectorModel{};
    model.hyperparams.dim = pv.at("dim").get<int>();
    model.hyperparams.epochs = pv.at("epochs").get<int>();
    model.hyperparams.window = pv.at("window").get<int>();
    model.hyperparams.negative_samples = pv.at("negative_samples").get<int>();
    model.hyperparams.initial_learning_rate = pv.at("initial_learning_rate").get<double>();
    model.hyperparams.min_count = pv.at("min_count").get<int>();
    model.hyperparams.seed = pv.at("seed").get<uint64_t>();
    model.vocab = pv.at("vocab").get<std::vector<std::string>>();
    model.paragraph_ids = pv.at("paragraph_ids").get<std::vector<std::string>>();
    for (size_t i = 0; i < model.vocab.size(); ++i) {
        model.term_ids[model.vocab[i]] = static_cast<int>(i);
    }
    model.doc_vectors = matrix_from_json(pv.at("doc_vectors"), model.hyperparams.dim);
    model.word_vectors = matrix_from_json(pv.at("word_vectors"), model.hyperparams.dim);
}

} // namespace docqa::retrieval
