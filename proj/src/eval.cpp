#include "docqa/eval.hpp"

#include "docqa/errors.hpp"
#include "docqa/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace docqa::eval {

using json = nlohmann::ordered_json;

std::vector<std::string> normalize_answer(std::string_view s) {
    std::string folded = text::casefold(s);
    std::string cleaned;
    cleaned.reserve(folded.size());
    for (char c : folded) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u) || u >= 0x80) {
            cleaned.push_back(c);
        } else {
            cleaned.push_back(' ');
        }
    }
    std::vector<std::string> tokens;
    std::istringstream in(cleaned);
    std::string tok;
    while (in >> tok) {
        if (tok == "a" || tok == "an" || tok == "the") {
            continue;
        }
        tokens.push_back(tok);
    }
    return tokens;
}

Scores token_f1(std::string_view predicted, std::string_view gold) {
    std::vector<std::string> pred = normalize_answer(predicted);
    std::vector<std::string> ref = normalize_answer(gold);
    if (pred.empty() && ref.empty()) {
        return {1.0, 1.0, 1.0};
    }

    std::map<std::string, int> ref_counts;
    for (const std::string& t : ref) {
        ++ref_counts[t];
    }
    size_t tp = 0;
    for (const std::string& t : pred) {
        auto it = ref_counts.find(t);
        if (it != ref_counts.end() && it->second > 0) {
            --it->second;
            ++tp;
        }
    }
    Scores s;
    s.precision = pred.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(pred.size());
    s.recall = ref.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(ref.size());
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

Scores best_gold_f1(std::string_view predicted, const std::vector<std::string>& golds) {
    if (golds.empty()) {
        throw ArgumentError("best_gold_f1 requires at least one gold answer");
    }
    Scores best = token_f1(predicted, golds.front());
    for (size_t i = 1; i < golds.size(); ++i) {
        Scores s = token_f1(predicted, golds[i]);
        if (s.f1 > best.f1) {
            best = s;
        }
    }
    return best;
}

double normalize_q(int q) {
    if (q < 1 || q > 3) {
        throw ArgumentError("q score must be 1, 2 or 3");
    }
    return (q - 1) / 2.0;
}

RunReport evaluate_run(const std::vector<QaExample>& examples,
                       const std::map<std::string, std::string>& predictions,
                       const std::map<std::string, int>& q_scores,
                       std::string_view system_label) {
    std::vector<std::string> unknown;
    for (const auto& [id, answer] : predictions) {
        (void)answer;
        bool found = std::any_of(examples.begin(), examples.end(),
                                 [&](const QaExample& e) { return e.id == id; });
        if (!found) {
            unknown.push_back(id);
        }
    }
    if (!unknown.empty()) {
        std::string msg = "predictions reference unknown example ids:";
        for (const std::string& id : unknown) {
            msg += " " + id;
        }
        throw ValidationError(msg);
    }

    RunReport report;
    report.system_label = std::string(system_label);
    double f1_sum = 0.0;
    double q_sum = 0.0;
    size_t q_count = 0;
    for (const QaExample& ex : examples) {
        if (ex.gold_answers.empty()) {
            throw ValidationError("example " + ex.id + " has no gold answers");
        }
        EvalRecord rec;
        rec.example_id = ex.id;
        auto it = predictions.find(ex.id);
        rec.predicted = it == predictions.end() ? "" : it->second;
        Scores s = best_gold_f1(rec.predicted, ex.gold_answers);
        rec.precision = s.precision;
        rec.recall = s.recall;
        rec.f1 = s.f1;
        auto qit = q_scores.find(ex.id);
        if (qit != q_scores.end()) {
            rec.q_score = qit->second;
            rec.q_normalized = normalize_q(qit->second);
            q_sum += *rec.q_normalized;
            ++q_count;
        }
        f1_sum += rec.f1;
        report.records.push_back(std::move(rec));
    }
    report.mean_f1 = examples.empty() ? 0.0 : f1_sum / static_cast<double>(examples.size());
    if (q_count > 0) {
        report.mean_q_normalized = q_sum / static_cast<double>(q_count);
    }
    return report;
}

namespace {

json run_to_json(const RunReport& run) {
    json sys;
    sys["label"] = run.system_label;
    sys["mean_f1"] = run.mean_f1;
    if (run.mean_q_normalized) {
        sys["mean_q_normalized"] = *run.mean_q_normalized;
    }
    json records = json::array();
    for (const EvalRecord& rec : run.records) {
        json r;
        r["id"] = rec.example_id;
        r["predicted"] = rec.predicted;
        r["precision"] = rec.precision;
        r["recall"] = rec.recall;
        r["f1"] = rec.f1;
        if (rec.q_score) {
            r["q_score"] = *rec.q_score;
            r["q_normalized"] = *rec.q_normalized;
        }
        records.push_back(std::move(r));
    }
    sys["records"] = std::move(records);
    return sys;
}

} // namespace

std::string report_to_json(const std::vector<ReportRow>& rows) {
    json out;
    json docs = json::array();
    for (const ReportRow& row : rows) {
        json d;
        d["document"] = row.document;
        d["size_words"] = row.size_words;
        d["num_questions"] = row.num_questions;
        json systems = json::array();
        for (const RunReport& run : row.systems) {
            systems.push_back(run_to_json(run));
        }
        d["systems"] = std::move(systems);
        docs.push_back(std::move(d));
    }
    out["documents"] = std::move(docs);
    return out.dump(2) + "\n";
}

std::string report_to_table(const std::vector<ReportRow>& rows) {
    // Column layout mirrors the usual comparison table: document, size,
    // question count, then F1 / Q per system.
    std::vector<std::string> labels;
    for (const ReportRow& row : rows) {
        for (const RunReport& run : row.systems) {
            if (std::find(labels.begin(), labels.end(), run.system_label) == labels.end()) {
                labels.push_back(run.system_label);
            }
        }
    }

    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header = {"Document", "Size(words)", "Questions"};
    for (const std::string& label : labels) {
        header.push_back(label + " F1");
        header.push_back(label + " Q");
    }
    cells.push_back(header);

    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f%%", v * 100.0);
        return std::string(buf);
    };
    for (const ReportRow& row : rows) {
        std::vector<std::string> line = {row.document, std::to_string(row.size_words),
                                         std::to_string(row.num_questions)};
        for (const std::string& label : labels) {
            auto it = std::find_if(row.systems.begin(), row.systems.end(),
                                   [&](const RunReport& r) { return r.system_label == label; });
            if (it == row.systems.end()) {
                line.push_back("-");
                line.push_back("-");
            } else {
                line.push_back(fmt(it->mean_f1));
                line.push_back(it->mean_q_normalized ? fmt(*it->mean_q_normalized) : "-");
            }
        }
        cells.push_back(std::move(line));
    }

    std::vector<size_t> widths(cells.front().size(), 0);
    for (const auto& line : cells) {
        for (size_t i = 0; i < line.size(); ++i) {
            widths[i] = std::max(widths[i], line[i].size());
        }
    }
    std::ostringstream out;
    for (const auto& line : cells) {
        for (size_t i = 0; i < line.size(); ++i) {
            out << line[i];
            if (i + 1 < line.size()) {
                out << std::string(widths[i] - line[i].size() + 2, ' ');
            }
        }
        out << "\n";
    }
    return out.str();
}

Dataset load_dataset(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("dataset is not valid JSON: ") + e.what());
    }
    if (!root.contains("data") || !root["data"].is_array()) {
        throw InputError("dataset must contain a \"data\" array");
    }
    Dataset ds;
    for (const json& doc : root["data"]) {
        if (ds.title.empty() && doc.contains("title")) {
            ds.title = doc["title"].get<std::string>();
        }
        for (const json& para : doc.at("paragraphs")) {
            std::string context = para.at("context").get<std::string>();
            ds.size_words += text::word_spans(context).size();
            for (const json& qa : para.at("qas")) {
                QaExample ex;
                ex.id = qa.at("id").get<std::string>();
                ex.question = qa.at("question").get<std::string>();
                ex.context_ref = para.contains("id") ? para["id"].get<std::string>() : "";
                for (const json& ans : qa.at("answers")) {
                    ex.gold_answers.push_back(ans.at("text").get<std::string>());
                }
                if (ex.gold_answers.empty()) {
                    throw ValidationError("example " + ex.id + " has no gold answers");
                }
                ds.examples.push_back(std::move(ex));
            }
        }
    }
    return ds;
}

std::map<std::string, std::string> load_predictions(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("predictions file is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw InputError("predictions file must map example id to answer string");
    }
    std::map<std::string, std::string> out;
    for (auto it = root.begin(); it != root.end(); ++it) {
        out[it.key()] = it.value().get<std::string>();
    }
    return out;
}

std::map<std::string, int> load_q_scores(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("q-scores file is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw InputError("q-scores file must map example id to 1|2|3");
    }
    std::map<std::string, int> out;
    for (auto it = root.begin(); it != root.end(); ++it) {
        int q = it.value().get<int>();
        if (q < 1 || q > 3) {
            throw ValidationError("q score for " + it.key() + " out of range");
        }
        out[it.key()] = q;
    }
    return out;
}

} // namespace docqa::eval
