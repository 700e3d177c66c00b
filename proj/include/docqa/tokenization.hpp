#pragma once

#include "docqa/corpus.hpp"
#include "docqa/dependency.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace docqa::tokenization {

enum class TokenClass { Definition, Dependency };
enum class TokenSource { KeywordDefinition, Lexicon, DependencyGroup };

struct TokenEntry {
    std::string token;
    std::string phrase; // canonical form (casefolded, whitespace-collapsed)
    std::set<std::string> surface_forms;
    TokenClass cls = TokenClass::Definition;
    TokenSource source = TokenSource::KeywordDefinition;
};

// Bijective phrase <-> token store. Lookups canonicalize first, so one
// canonical phrase always maps to one token symbol no matter how it was
// spelled; repeated phrases across the document share a token.
//
// Minted symbols are X1X{n} for the definition class and Y1Y{n} for the
// dependency class. Imported registries may carry other symbols as long as
// they start with the class letter; the matcher treats them verbatim.
class TokenRegistry {
public:
    // Returns the existing token when the canonical phrase is already
    // registered (first registration wins, across classes); otherwise mints
    // the next symbol of `cls`.
    std::string register_phrase(std::string_view phrase, TokenClass cls, TokenSource source);

    // Inserts a fully specified entry (deserialization, seeded replays).
    void insert(TokenEntry entry);

    std::optional<std::string> token_for(std::string_view phrase) const;
    std::optional<std::string> phrase_for(std::string_view token) const;
    bool has_token(std::string_view token) const;
    void record_surface(std::string_view token, std::string_view surface);

    const std::map<std::string, TokenEntry>& entries() const { return entries_; }
    size_t size() const { return entries_.size(); }

    std::string to_json() const;
    static TokenRegistry from_json(const std::string& json_text);

private:
    std::map<std::string, TokenEntry> entries_;       // canonical phrase -> entry
    std::map<std::string, std::string> reverse_;      // token -> canonical phrase
    size_t next_definition_id_ = 1;
    size_t next_dependency_id_ = 1;
};

struct DefinitionSentence {
    std::string paragraph_id;
    size_t sentence_index = 0;
    std::string trigger_keyword;
    size_t span_begin = 0; // token offsets into the sentence's parser tokens
    size_t span_end = 0;   // half-open
    std::string subject_phrase;
};

std::set<std::string> default_definition_keywords();

// Finds sentences where a keyword acts as the governing verb and extracts
// the subject subtree as the definition subject. Sentences the provider
// cannot parse are skipped.
std::vector<DefinitionSentence> find_definitions(const corpus::Document& doc,
                                                 const std::set<std::string>& keywords,
                                                 dependency::Provider& provider);

// Registers the definition subjects and the lexicon phrases, then replaces
// every occurrence document-wide (canonical match, longest first, left to
// right, non-overlapping). Replacement happens in place: surrounding
// punctuation and spacing are preserved byte for byte.
corpus::Document apply_definition_tokenization(const corpus::Document& doc,
                                               TokenRegistry& registry,
                                               const std::vector<DefinitionSentence>& defs,
                                               const std::vector<std::string>& lexicon);

struct TokenizationWarning {
    std::string paragraph_id;
    size_t sentence_index = 0;
    std::string reason;
};

struct DependencyTokenizationResult {
    corpus::Document doc;
    std::vector<TokenizationWarning> warnings;
};

// Per sentence, replaces the root verb's subject group and each object
// group with one dependency-class token. Sentences whose parse fails are
// left untouched and reported in the warnings list.
DependencyTokenizationResult apply_dependency_tokenization(const corpus::Document& doc,
                                                           TokenRegistry& registry,
                                                           dependency::Provider& provider);

// Replaces every registered phrase in free text (no new minting). This is
// the question-side matching rule: canonical longest-match replacement only.
std::string replace_registered(std::string_view text, const TokenRegistry& registry);

// Inverse mapping: standalone token symbols become their canonical phrase;
// unknown symbols pass through.
std::string detokenize(std::string_view text, const TokenRegistry& registry);

// Newline-delimited phrase list ('#' comments allowed).
std::vector<std::string> parse_lexicon(std::string_view content);

std::string warnings_to_jsonl(const std::vector<TokenizationWarning>& warnings);

} // namespace docqa::tokenization
