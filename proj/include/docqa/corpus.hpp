#pragma once

#include "docqa/text.hpp"

#include <optional>
#include <string>
#include <vector>

namespace docqa::corpus {

// A split unit of a document. `text` is always an exact substring of the
// source document; `leading_separator` is the source text between the end of
// the previous paragraph and the start of this one (section markers live
// there when headings are kept out of the body).
struct Paragraph {
    std::string id;
    std::string doc_id;
    std::vector<std::string> heading_path;
    std::string text;
    std::vector<std::string> sentences;
    size_t token_count = 0;
    std::string leading_separator;
};

struct Document {
    std::string id;
    std::string title;
    std::string raw_text;
    std::vector<Paragraph> paragraphs;
    // Source text after the last paragraph (trailing markers/whitespace).
    std::string trailing_separator;
};

struct SplitConfig {
    // One regex per hierarchy level, outermost first. A match's first capture
    // group (or the full match when there is none) becomes the heading label.
    std::vector<std::string> hierarchy_patterns;
    size_t min_tokens = 30;
    size_t max_tokens = 300;
    bool merge_short = true;
    // Resolution of whether headings stay in the body: by default they are
    // captured only in heading_path; set to true to keep them in text.
    bool headings_in_text = false;
    std::vector<std::string> abbreviations; // empty -> built-in default list
};

// Patterns for US-regulation style markers: "§ 353.3", "(a)", "(1)".
std::vector<std::string> default_hierarchy_patterns();
std::vector<std::string> default_abbreviations();

// Number of tokens under the toolkit's counting rule: whitespace-delimited
// runs, with trailing sentence punctuation (, ; . :) peeled off and counted
// as tokens of their own. "31, 1985," counts as 4.
size_t count_tokens(std::string_view s);

// Token spans matching count_tokens; shared with the chunking module so both
// agree on what a token is.
std::vector<text::Span> count_token_spans(std::string_view s);

// Rule-based sentence segmentation: splits after . ! ? followed by
// whitespace and an uppercase letter or digit, unless the preceding token is
// a known abbreviation or the break would land inside an enumeration marker
// such as "(a)". Returns trimmed sentences.
std::vector<std::string> segment_sentences(std::string_view s,
                                           const std::vector<std::string>& abbreviations = {});

// Spans of the sentences returned by segment_sentences; the gaps between
// spans are whitespace only.
std::vector<text::Span> sentence_spans(std::string_view s,
                                       const std::vector<std::string>& abbreviations = {});

// Split raw text into hierarchical paragraphs.
//
// Section markers matching config.hierarchy_patterns delimit segments and
// populate heading_path. Inside a segment, sentences are packed greedily up
// to max_tokens; a trailing pack shorter than min_tokens is merged into its
// neighbour when merge_short is set. Merging never crosses a section marker.
Document ingest(std::string_view raw, std::string_view title, const SplitConfig& config);

// Reconstructs the exact source text (lossless-split invariant).
std::string reconstruct(const Document& doc);

// Paragraph store: JSON array of
// {"id","doc_id","heading_path","text","sentences","token_count"}.
std::string store_to_json(const std::vector<Paragraph>& paragraphs);
std::vector<Paragraph> store_from_json(const std::string& json_text);

} // namespace docqa::corpus
