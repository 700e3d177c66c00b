#include "docqa/eval.hpp"

#include "docqa/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace docqa;

namespace {

// Independent brute-force oracle: same normalization contract, but the
// multiset overlap is computed by sorting and erasing instead of counting
// maps, so a bug has to happen twice to slip through.
eval::Scores oracle_f1(const std::string& predicted, const std::string& gold) {
    auto normalize = [](const std::string& s) {
        std::string cleaned;
        for (char c : s) {
            unsigned char u = static_cast<unsigned char>(c);
            if (std::isalnum(u)) {
                cleaned.push_back(static_cast<char>(std::tolower(u)));
            } else {
                cleaned.push_back(' ');
            }
        }
        std::vector<std::string> tokens;
        std::istringstream in(cleaned);
        std::string tok;
        while (in >> tok) {
            if (tok != "a" && tok != "an" && tok != "the") {
                tokens.push_back(tok);
            }
        }
        return tokens;
    };
    std::vector<std::string> pred = normalize(predicted);
    std::vector<std::string> ref = normalize(gold);
    if (pred.empty() && ref.empty()) {
        return {1.0, 1.0, 1.0};
    }
    std::vector<std::string> remaining = ref;
    size_t tp = 0;
    for (const std::string& t : pred) {
        auto it = std::find(remaining.begin(), remaining.end(), t);
        if (it != remaining.end()) {
            remaining.erase(it);
            ++tp;
        }
    }
    eval::Scores s;
    s.precision = pred.empty() ? 0.0 : double(tp) / double(pred.size());
    s.recall = ref.empty() ? 0.0 : double(tp) / double(ref.size());
    s.f1 = (s.precision + s.recall) > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall)
                                        : 0.0;
    return s;
}

} // namespace

TEST_CASE("token_f1 fixtures") {
    auto identical = eval::token_f1("a b c", "a b c");
    CHECK(identical.precision == 1.0);
    CHECK(identical.recall == 1.0);
    CHECK(identical.f1 == 1.0);

    // "a" drops as an article, leaving {b,d} vs {b,c}.
    auto half = eval::token_f1("a b d", "a b c");
    CHECK(half.precision == doctest::Approx(0.5));
    CHECK(half.recall == doctest::Approx(0.5));
    CHECK(half.f1 == doctest::Approx(0.5));

    auto disjoint = eval::token_f1("x", "y");
    CHECK(disjoint.precision == 0.0);
    CHECK(disjoint.recall == 0.0);
    CHECK(disjoint.f1 == 0.0);
}

TEST_CASE("token_f1 counts repeated tokens as a multiset") {
    // predicted has one "b", gold has two: tp=1, fp=0, fn=1.
    auto s = eval::token_f1("b", "b b");
    CHECK(s.precision == doctest::Approx(1.0));
    CHECK(s.recall == doctest::Approx(0.5));
}

TEST_CASE("token_f1 handles the empty-after-normalization corner") {
    auto s = eval::token_f1("the", "an");
    CHECK(s.f1 == 1.0);
    auto t = eval::token_f1("the", "word");
    CHECK(t.f1 == 0.0);
}

TEST_CASE("token_f1 is symmetric in f1") {
    const char* samples[] = {"one two three", "two three four", "alpha", "", "the a an"};
    for (const char* a : samples) {
        for (const char* b : samples) {
            CHECK(eval::token_f1(a, b).f1 == doctest::Approx(eval::token_f1(b, a).f1));
        }
    }
}

TEST_CASE("token_f1 agrees with the brute-force oracle on 50 random pairs") {
    std::mt19937 rng(1234);
    const char* vocab[] = {"the", "a",     "bank",  "report", "files", "activity",
                           "of",  "must",  "within","days",   "1985",  "section",
                           "an",  "under", "rule",  "b",      "c",     "d"};
    auto random_text = [&]() {
        std::string out;
        size_t words = rng() % 8;
        for (size_t i = 0; i < words; ++i) {
            if (!out.empty()) {
                out += ' ';
            }
            out += vocab[rng() % (sizeof(vocab) / sizeof(vocab[0]))];
            if (rng() % 5 == 0) {
                out += ',';
            }
        }
        return out;
    };
    for (int i = 0; i < 50; ++i) {
        std::string pred = random_text();
        std::string gold = random_text();
        auto got = eval::token_f1(pred, gold);
        auto expected = oracle_f1(pred, gold);
        CHECK(got.precision == doctest::Approx(expected.precision));
        CHECK(got.recall == doctest::Approx(expected.recall));
        CHECK(got.f1 == doctest::Approx(expected.f1));
    }
}

TEST_CASE("best_gold_f1 picks the best reference") {
    CHECK(eval::best_gold_f1("b d", {"b c", "b d"}).f1 == doctest::Approx(1.0));
    CHECK(eval::best_gold_f1("y", {"x"}).f1 == 0.0);
    auto exact = eval::best_gold_f1("same words", {"same words", "other"});
    CHECK(exact.f1 == 1.0);
    CHECK_THROWS_AS(eval::best_gold_f1("x", {}), ArgumentError);
}

TEST_CASE("normalize_q is the affine map sending 1,2,3 to 0, 0.5, 1") {
    CHECK(eval::normalize_q(1) == 0.0);
    CHECK(eval::normalize_q(2) == 0.5);
    CHECK(eval::normalize_q(3) == 1.0);
    CHECK_THROWS_AS(eval::normalize_q(0), ArgumentError);
    CHECK_THROWS_AS(eval::normalize_q(4), ArgumentError);
}

namespace {

std::vector<eval::QaExample> three_examples() {
    return {
        {"e1", "q one", "p1", {"answer one"}},
        {"e2", "q two", "p2", {"answer two", "second answer"}},
        {"e3", "q three", "p3", {"answer three"}},
    };
}

} // namespace

TEST_CASE("evaluate_run with perfect predictions") {
    auto examples = three_examples();
    std::map<std::string, std::string> perfect = {
        {"e1", "answer one"}, {"e2", "answer two"}, {"e3", "answer three"}};
    auto report = eval::evaluate_run(examples, perfect);
    CHECK(report.mean_f1 == doctest::Approx(1.0));
    CHECK(!report.mean_q_normalized.has_value());
}

TEST_CASE("evaluate_run scores missing predictions as empty strings") {
    auto report = eval::evaluate_run(three_examples(), {});
    CHECK(report.mean_f1 == doctest::Approx(0.0));
    REQUIRE(report.records.size() == 3);
    CHECK(report.records[0].predicted == "");
}

TEST_CASE("evaluate_run rejects unknown prediction ids") {
    std::map<std::string, std::string> bad = {{"nope", "x"}};
    CHECK_THROWS_AS(eval::evaluate_run(three_examples(), bad), ValidationError);
}

TEST_CASE("evaluate_run aggregates q scores over the scored subset") {
    std::map<std::string, std::string> preds = {
        {"e1", "answer one"}, {"e2", "wrong"}, {"e3", "answer three"}};
    std::map<std::string, int> qs = {{"e1", 3}, {"e2", 1}};
    auto report = eval::evaluate_run(three_examples(), preds, qs, "demo");
    REQUIRE(report.mean_q_normalized.has_value());
    CHECK(*report.mean_q_normalized == doctest::Approx(0.5)); // (1.0 + 0.0) / 2
    double sum = 0;
    for (const auto& rec : report.records) {
        sum += rec.f1;
    }
    CHECK(report.mean_f1 == doctest::Approx(sum / 3.0));
}

TEST_CASE("two systems produce a two-column-group report") {
    auto examples = three_examples();
    std::map<std::string, std::string> good = {
        {"e1", "answer one"}, {"e2", "answer two"}, {"e3", "answer three"}};
    std::map<std::string, std::string> poor = {{"e1", "answer one"}};
    eval::ReportRow row;
    row.document = "demo-doc";
    row.size_words = 120;
    row.num_questions = examples.size();
    row.systems.push_back(eval::evaluate_run(examples, good, {}, "full"));
    row.systems.push_back(eval::evaluate_run(examples, poor, {}, "partial"));

    std::string table = eval::report_to_table({row});
    CHECK(table.find("demo-doc") != std::string::npos);
    CHECK(table.find("full F1") != std::string::npos);
    CHECK(table.find("partial F1") != std::string::npos);

    std::string json_report = eval::report_to_json({row});
    CHECK(json_report.find("\"mean_f1\"") != std::string::npos);
}

TEST_CASE("dataset loader reads the extractive-QA JSON layout") {
    std::string data = R"({"data":[{"title":"doc","paragraphs":[
        {"context":"Alpha beta gamma.","qas":[
            {"id":"x1","question":"what?","answers":[{"text":"alpha"}]}]}]}]})";
    auto ds = eval::load_dataset(data);
    CHECK(ds.title == "doc");
    CHECK(ds.size_words == 3);
    REQUIRE(ds.examples.size() == 1);
    CHECK(ds.examples[0].gold_answers == std::vector<std::string>{"alpha"});
    CHECK_THROWS_AS(eval::load_dataset("{}"), InputError);
}
