#include "docqa/tokenization.hpp"

#include "docqa/corpus.hpp"
#include "docqa/errors.hpp"

#include <doctest.h>

using namespace docqa;

namespace {

corpus::Document single_sentence_doc(const std::string& sentence) {
    corpus::SplitConfig cfg;
    cfg.min_tokens = 1;
    cfg.max_tokens = 1000;
    cfg.hierarchy_patterns = {};
    return corpus::ingest(sentence, "fixture", cfg);
}

} // namespace

TEST_CASE("register_phrase mints class-specific symbols") {
    tokenization::TokenRegistry reg;
    CHECK(reg.register_phrase("Common ownership", tokenization::TokenClass::Definition,
                              tokenization::TokenSource::KeywordDefinition) == "X1X1");
    // Canonicalization folds case and whitespace onto the same entry.
    CHECK(reg.register_phrase("common   OWNERSHIP", tokenization::TokenClass::Definition,
                              tokenization::TokenSource::KeywordDefinition) == "X1X1");
    CHECK(reg.size() == 1);

    tokenization::TokenRegistry reg2;
    CHECK(reg2.register_phrase("a suspicious activity report",
                               tokenization::TokenClass::Dependency,
                               tokenization::TokenSource::DependencyGroup) == "Y1Y1");
}

TEST_CASE("first registration wins across classes") {
    tokenization::TokenRegistry reg;
    std::string token = reg.register_phrase("shared phrase", tokenization::TokenClass::Definition,
                                            tokenization::TokenSource::KeywordDefinition);
    CHECK(reg.register_phrase("shared phrase", tokenization::TokenClass::Dependency,
                              tokenization::TokenSource::DependencyGroup) == token);
}

TEST_CASE("register_phrase rejects empty phrases") {
    tokenization::TokenRegistry reg;
    CHECK_THROWS_AS(reg.register_phrase("  ,, ", tokenization::TokenClass::Definition,
                                        tokenization::TokenSource::KeywordDefinition),
                    ArgumentError);
}

TEST_CASE("insert validates token format and bijection") {
    tokenization::TokenRegistry reg;
    tokenization::TokenEntry entry;
    entry.token = "X1441";
    entry.phrase = "of the Financing Corporation";
    entry.cls = tokenization::TokenClass::Definition;
    CHECK_NOTHROW(reg.insert(entry));

    tokenization::TokenEntry wrong_class = entry;
    wrong_class.token = "X99";
    wrong_class.phrase = "another phrase";
    wrong_class.cls = tokenization::TokenClass::Dependency; // Y expected
    CHECK_THROWS_AS(reg.insert(wrong_class), ValidationError);

    tokenization::TokenEntry duplicate_token = entry;
    duplicate_token.phrase = "different phrase";
    CHECK_THROWS_AS(reg.insert(duplicate_token), ValidationError);

    tokenization::TokenEntry duplicate_phrase = entry;
    duplicate_phrase.token = "X77";
    CHECK_THROWS_AS(reg.insert(duplicate_phrase), ValidationError);
}

TEST_CASE("entries and reverse stay mutually inverse") {
    tokenization::TokenRegistry reg;
    reg.register_phrase("first phrase", tokenization::TokenClass::Definition,
                        tokenization::TokenSource::KeywordDefinition);
    reg.register_phrase("second phrase", tokenization::TokenClass::Dependency,
                        tokenization::TokenSource::DependencyGroup);
    for (const auto& [phrase, entry] : reg.entries()) {
        CHECK(reg.phrase_for(entry.token) == phrase);
        CHECK(reg.token_for(phrase) == entry.token);
    }
}

TEST_CASE("registry JSON round-trip preserves entries and minting state") {
    tokenization::TokenRegistry reg;
    reg.register_phrase("Common ownership", tokenization::TokenClass::Definition,
                        tokenization::TokenSource::KeywordDefinition);
    reg.register_phrase("suspicious activity report", tokenization::TokenClass::Dependency,
                        tokenization::TokenSource::DependencyGroup);
    auto loaded = tokenization::TokenRegistry::from_json(reg.to_json());
    CHECK(loaded.size() == reg.size());
    CHECK(loaded.token_for("common ownership") == std::string("X1X1"));
    // Minting continues past imported ids.
    CHECK(loaded.register_phrase("new phrase", tokenization::TokenClass::Definition,
                                 tokenization::TokenSource::KeywordDefinition) == "X1X2");
}

TEST_CASE("find_definitions extracts the subject of a keyword verb") {
    auto provider = dependency::make_heuristic_provider();
    auto doc = single_sentence_doc("Common ownership means a relationship between two companies.");
    auto defs = tokenization::find_definitions(doc, tokenization::default_definition_keywords(),
                                               *provider);
    REQUIRE(defs.size() == 1);
    CHECK(defs[0].subject_phrase == "Common ownership");
    CHECK(defs[0].trigger_keyword == "means");
    CHECK(defs[0].sentence_index == 0);
    CHECK(defs[0].span_begin < defs[0].span_end);
}

TEST_CASE("find_definitions returns nothing without keywords present") {
    auto provider = dependency::make_heuristic_provider();
    auto doc = single_sentence_doc("The report is long.");
    CHECK(tokenization::find_definitions(doc, tokenization::default_definition_keywords(),
                                         *provider)
              .empty());
}

TEST_CASE("find_definitions includes the known false-positive mode") {
    // "mean" governs this sentence even though it defines nothing, so the
    // heuristic provider reports it; the keyword list is the only filter.
    auto provider = dependency::make_heuristic_provider();
    auto doc = single_sentence_doc("These values mean nothing to the average reader.");
    auto defs = tokenization::find_definitions(doc, tokenization::default_definition_keywords(),
                                               *provider);
    REQUIRE(defs.size() == 1);
    CHECK(defs[0].subject_phrase == "These values");
}

TEST_CASE("find_definitions requires a non-empty keyword set") {
    auto provider = dependency::make_heuristic_provider();
    auto doc = single_sentence_doc("Anything at all.");
    CHECK_THROWS_AS(tokenization::find_definitions(doc, {}, *provider), ArgumentError);
}

TEST_CASE("definition tokenization reproduces the worked examples") {
    auto provider = dependency::make_heuristic_provider();
    tokenization::TokenRegistry reg;

    auto doc = single_sentence_doc("Common ownership means a relationship between two companies.");
    auto defs = tokenization::find_definitions(doc, tokenization::default_definition_keywords(),
                                               *provider);
    auto tokenized = tokenization::apply_definition_tokenization(doc, reg, defs, {});
    CHECK(tokenized.paragraphs[0].text == "X1X1 means a relationship between two companies.");

    auto doc2 =
        single_sentence_doc("Financial Institution needs to submit a suspicious activity report.");
    auto tokenized2 =
        tokenization::apply_definition_tokenization(doc2, reg, {}, {"Financial Institution"});
    CHECK(tokenized2.paragraphs[0].text ==
          "X1X2 needs to submit a suspicious activity report.");
}

TEST_CASE("definition tokenization replaces every occurrence document-wide") {
    auto provider = dependency::make_heuristic_provider();
    tokenization::TokenRegistry reg;
    auto doc = single_sentence_doc("Covered institution means a supervised bank. Every covered "
                                   "institution files reports. The covered institution retains "
                                   "records.");
    auto defs = tokenization::find_definitions(doc, tokenization::default_definition_keywords(),
                                               *provider);
    REQUIRE(defs.size() == 1);
    auto tokenized = tokenization::apply_definition_tokenization(doc, reg, defs, {});
    std::string text = tokenized.paragraphs[0].text;
    CHECK(text.find("Covered institution") == std::string::npos);
    CHECK(text.find("covered institution") == std::string::npos);
    // Three occurrences, one token symbol.
    size_t count = 0;
    for (size_t pos = text.find("X1X1"); pos != std::string::npos;
         pos = text.find("X1X1", pos + 1)) {
        ++count;
    }
    CHECK(count == 3);
}

TEST_CASE("longer registered phrases shadow their prefixes") {
    tokenization::TokenRegistry reg;
    reg.register_phrase("Financial Institution", tokenization::TokenClass::Definition,
                        tokenization::TokenSource::Lexicon);
    reg.register_phrase("Financial Institution Letter", tokenization::TokenClass::Definition,
                        tokenization::TokenSource::Lexicon);
    std::string replaced = tokenization::replace_registered(
        "The Financial Institution Letter explains what a Financial Institution files.", reg);
    CHECK(replaced == "The X1X2 explains what a X1X1 files.");
}

TEST_CASE("paragraphs without registered phrases are unchanged") {
    tokenization::TokenRegistry reg;
    auto doc = single_sentence_doc("Nothing matches here.");
    auto tokenized = tokenization::apply_definition_tokenization(doc, reg, {}, {});
    CHECK(tokenized.paragraphs[0].text == doc.paragraphs[0].text);
}

TEST_CASE("dependency tokenization groups subjects and objects") {
    auto provider = dependency::make_heuristic_provider();
    tokenization::TokenRegistry reg;
    auto doc = single_sentence_doc(
        "Bank and insurance company need to submit a suspicious activity report.");
    auto result = tokenization::apply_dependency_tokenization(doc, reg, *provider);
    CHECK(result.warnings.empty());
    CHECK(result.doc.paragraphs[0].text == "Y1Y1 need to submit Y1Y2.");
    CHECK(reg.phrase_for("Y1Y1") == std::string("bank and insurance company"));
    CHECK(reg.phrase_for("Y1Y2") == std::string("a suspicious activity report"));
}

TEST_CASE("dependency tokenization with no object groups only the subject") {
    auto provider = dependency::make_heuristic_provider();
    tokenization::TokenRegistry reg;
    auto doc = single_sentence_doc("Banks file.");
    auto result = tokenization::apply_dependency_tokenization(doc, reg, *provider);
    CHECK(result.doc.paragraphs[0].text == "Y1Y1 file.");
}

TEST_CASE("dependency tokenization reuses tokens for repeated groups") {
    auto provider = dependency::make_heuristic_provider();
    tokenization::TokenRegistry reg;
    auto doc = single_sentence_doc(
        "Covered banks submit annual reports. Covered banks retain annual reports.");
    auto result = tokenization::apply_dependency_tokenization(doc, reg, *provider);
    const std::string& text = result.doc.paragraphs[0].text;
    CHECK(text == "Y1Y1 submit Y1Y2. Y1Y1 retain Y1Y2.");
}

namespace {

class FailingProvider : public dependency::Provider {
public:
    dependency::DependencyGraph parse(std::string_view) override {
        throw TransportError("provider offline");
    }
};

} // namespace

TEST_CASE("provider failures degrade gracefully with warnings") {
    FailingProvider provider;
    tokenization::TokenRegistry reg;
    auto doc = single_sentence_doc("Banks file reports.");
    auto result = tokenization::apply_dependency_tokenization(doc, reg, provider);
    CHECK(result.doc.paragraphs[0].text == doc.paragraphs[0].text);
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].sentence_index == 0);
    CHECK(!result.warnings[0].reason.empty());

    std::string jsonl = tokenization::warnings_to_jsonl(result.warnings);
    CHECK(jsonl.find("provider offline") != std::string::npos);
}

TEST_CASE("detokenize restores canonical phrases and passes unknowns through") {
    tokenization::TokenRegistry reg;
    reg.register_phrase("common ownership", tokenization::TokenClass::Definition,
                        tokenization::TokenSource::KeywordDefinition);
    CHECK(tokenization::detokenize("X1X1 means a relationship", reg) ==
          "common ownership means a relationship");
    CHECK(tokenization::detokenize("X9X9 stays as is", reg) == "X9X9 stays as is");
    CHECK(tokenization::detokenize("no tokens at all", reg) == "no tokens at all");
}

TEST_CASE("detokenize inverts tokenization up to canonicalization") {
    auto provider = dependency::make_heuristic_provider();
    tokenization::TokenRegistry reg;
    auto doc = single_sentence_doc("Common ownership means a relationship between two companies.");
    auto defs = tokenization::find_definitions(doc, tokenization::default_definition_keywords(),
                                               *provider);
    auto tokenized = tokenization::apply_definition_tokenization(doc, reg, defs, {});
    std::string restored = tokenization::detokenize(tokenized.paragraphs[0].text, reg);
    CHECK(text::canonical_phrase(restored) ==
          text::canonical_phrase(doc.paragraphs[0].text));
}

TEST_CASE("tokenization compresses and is deterministic") {
    auto doc = single_sentence_doc(
        "Bank and insurance company need to submit a suspicious activity report.");
    size_t before = doc.paragraphs[0].token_count;

    tokenization::TokenRegistry reg1;
    auto provider1 = dependency::make_heuristic_provider();
    auto run1 = tokenization::apply_dependency_tokenization(doc, reg1, *provider1);

    tokenization::TokenRegistry reg2;
    auto provider2 = dependency::make_heuristic_provider();
    auto run2 = tokenization::apply_dependency_tokenization(doc, reg2, *provider2);

    CHECK(run1.doc.paragraphs[0].token_count < before);
    CHECK(run1.doc.paragraphs[0].text == run2.doc.paragraphs[0].text);
    CHECK(reg1.to_json() == reg2.to_json());
}

TEST_CASE("question-side replacement uses registered phrases only") {
    tokenization::TokenRegistry reg;
    reg.register_phrase("suspicious activity report", tokenization::TokenClass::Dependency,
                        tokenization::TokenSource::DependencyGroup);
    std::string question = "When must banks file a suspicious activity report?";
    std::string replaced = tokenization::replace_registered(question, reg);
    CHECK(replaced == "When must banks file a Y1Y1?");
    // No minting happened.
    CHECK(reg.size() == 1);
}

TEST_CASE("lexicon files parse into phrase lists") {
    auto phrases = tokenization::parse_lexicon("# comment\nFinancial Institution\n\n  secure "
                                               "portal  \n");
    REQUIRE(phrases.size() == 2);
    CHECK(phrases[0] == "Financial Institution");
    CHECK(phrases[1] == "secure portal");
}
