#include "docqa/corpus.hpp"

#include "docqa/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <regex>

namespace docqa::corpus {

using json = nlohmann::ordered_json;

std::vector<std::string> default_hierarchy_patterns() {
    return {
        R"((§+\s?[0-9]+(?:\.[0-9]+)*[a-z]?))",
        R"((\([a-z]\)))",
        R"((\([0-9]+\)))",
    };
}

std::vector<std::string> default_abbreviations() {
    return {"U.S.C.", "U.S.",  "C.F.R.", "e.g.", "i.e.", "etc.", "No.",  "Nos.",
            "Sec.",   "Secs.", "Stat.",  "Pub.", "L.",   "Fed.", "Reg.", "Dr.",
            "Mr.",    "Ms.",   "Mrs.",   "Jr.",  "Sr.",  "St.",  "Inc.", "Corp.",
            "Co.",    "Ltd.",  "v.",     "vs.",  "Jan.", "Feb.", "Mar.", "Apr.",
            "Jun.",   "Jul.",  "Aug.",   "Sep.", "Oct.", "Nov.", "Dec."};
}

namespace {

bool is_detachable_punct(char c) {
    return c == ',' || c == ';' || c == '.' || c == ':';
}

} // namespace

std::vector<text::Span> count_token_spans(std::string_view s) {
    std::vector<text::Span> spans;
    size_t i = 0;
    while (i < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
            continue;
        }
        size_t begin = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        size_t end = i;
        // Peel trailing sentence punctuation: each mark is its own token.
        size_t core_end = end;
        while (core_end > begin && is_detachable_punct(s[core_end - 1])) {
            --core_end;
        }
        if (core_end > begin) {
            spans.push_back({begin, core_end});
        }
        for (size_t p = core_end; p < end; ++p) {
            spans.push_back({p, p + 1});
        }
    }
    return spans;
}

size_t count_tokens(std::string_view s) {
    return count_token_spans(s).size();
}

namespace {

bool is_sentence_final(char c) {
    return c == '.' || c == '!' || c == '?';
}

// Whitespace-token ending at position `end` (exclusive).
std::string_view token_ending_at(std::string_view s, size_t end) {
    size_t begin = end;
    while (begin > 0 && !std::isspace(static_cast<unsigned char>(s[begin - 1]))) {
        --begin;
    }
    return s.substr(begin, end - begin);
}

bool matches_abbreviation(std::string_view token, const std::vector<std::string>& abbreviations) {
    for (const std::string& a : abbreviations) {
        if (token.size() >= a.size()) {
            std::string_view tail = token.substr(token.size() - a.size());
            if (std::equal(tail.begin(), tail.end(), a.begin(), a.end(), [](char x, char y) {
                    return std::tolower(static_cast<unsigned char>(x)) ==
                           std::tolower(static_cast<unsigned char>(y));
                })) {
                // Avoid treating "running." as matching "n.": the abbreviation
                // must be the whole token or start after a non-letter.
                if (token.size() == a.size() ||
                    !std::isalpha(static_cast<unsigned char>(token[token.size() - a.size() - 1]))) {
                    return true;
                }
            }
        }
    }
    return false;
}

// True when the character run around `pos` looks like an enumeration marker
// "(a)" or "(1)": the candidate period sits between '(' and ')'.
bool inside_enumeration(std::string_view s, size_t pos) {
    size_t open = pos;
    size_t steps = 0;
    while (open > 0 && steps < 4) {
        --open;
        ++steps;
        if (s[open] == '(') {
            for (size_t close = pos + 1; close < s.size() && close <= pos + 4; ++close) {
                if (s[close] == ')') {
                    return true;
                }
                if (std::isspace(static_cast<unsigned char>(s[close]))) {
                    break;
                }
            }
            return false;
        }
        if (std::isspace(static_cast<unsigned char>(s[open]))) {
            return false;
        }
    }
    return false;
}

} // namespace

std::vector<text::Span> sentence_spans(std::string_view s,
                                       const std::vector<std::string>& abbreviations) {
    const std::vector<std::string>& abbrevs =
        abbreviations.empty() ? default_abbreviations() : abbreviations;

    std::vector<size_t> breaks; // positions where a new sentence starts
    size_t i = 0;
    while (i < s.size()) {
        if (!is_sentence_final(s[i])) {
            ++i;
            continue;
        }
        size_t punct_end = i + 1;
        while (punct_end < s.size() &&
               (is_sentence_final(s[punct_end]) || s[punct_end] == '"' || s[punct_end] == '\'' ||
                s[punct_end] == ')')) {
            ++punct_end;
        }
        size_t ws = punct_end;
        while (ws < s.size() && std::isspace(static_cast<unsigned char>(s[ws]))) {
            ++ws;
        }
        bool boundary = ws > punct_end && ws < s.size() &&
                        (std::isupper(static_cast<unsigned char>(s[ws])) ||
                         std::isdigit(static_cast<unsigned char>(s[ws])));
        if (boundary && s[i] == '.') {
            if (matches_abbreviation(token_ending_at(s, i + 1), abbrevs) ||
                inside_enumeration(s, i)) {
                boundary = false;
            }
        }
        if (boundary) {
            breaks.push_back(ws);
        }
        i = punct_end;
    }

    std::vector<text::Span> spans;
    size_t begin = 0;
    auto push_span = [&](size_t from, size_t to) {
        while (from < to && std::isspace(static_cast<unsigned char>(s[from]))) {
            ++from;
        }
        while (to > from && std::isspace(static_cast<unsigned char>(s[to - 1]))) {
            --to;
        }
        if (from < to) {
            spans.push_back({from, to});
        }
    };
    for (size_t b : breaks) {
        push_span(begin, b);
        begin = b;
    }
    push_span(begin, s.size());
    return spans;
}

std::vector<std::string> segment_sentences(std::string_view s,
                                           const std::vector<std::string>& abbreviations) {
    std::vector<std::string> out;
    for (const text::Span& span : sentence_spans(s, abbreviations)) {
        out.emplace_back(s.substr(span.begin, span.size()));
    }
    return out;
}

namespace {

struct Marker {
    size_t pos = 0;
    size_t len = 0;
    size_t level = 0;
    std::string label;
};

std::vector<Marker> find_markers(std::string_view raw, const std::vector<std::regex>& patterns) {
    std::vector<Marker> markers;
    for (size_t level = 0; level < patterns.size(); ++level) {
        auto begin = std::cregex_iterator(raw.data(), raw.data() + raw.size(), patterns[level]);
        for (auto it = begin; it != std::cregex_iterator(); ++it) {
            Marker m;
            m.pos = static_cast<size_t>(it->position(0));
            m.len = static_cast<size_t>(it->length(0));
            m.level = level;
            if (it->size() > 1 && (*it)[1].matched) {
                m.label = it->str(1);
            } else {
                m.label = it->str(0);
            }
            markers.push_back(std::move(m));
        }
    }
    std::sort(markers.begin(), markers.end(), [](const Marker& a, const Marker& b) {
        if (a.pos != b.pos) {
            return a.pos < b.pos;
        }
        return a.level < b.level;
    });
    // Drop overlapping matches, keeping the earliest (then outermost).
    std::vector<Marker> kept;
    size_t covered = 0;
    for (Marker& m : markers) {
        if (m.pos < covered) {
            continue;
        }
        covered = m.pos + m.len;
        kept.push_back(std::move(m));
    }
    return kept;
}

struct Segment {
    size_t begin = 0;
    size_t end = 0;
    std::vector<std::string> heading_path;
};

// Greedy sentence packing within a segment: fill up to max_tokens, then when
// merge_short is set fold packs shorter than min_tokens into a neighbour.
std::vector<std::vector<text::Span>> pack_sentences(std::string_view seg_text,
                                                    const std::vector<text::Span>& sents,
                                                    const SplitConfig& config) {
    std::vector<std::vector<text::Span>> packs;
    std::vector<text::Span> current;
    size_t current_tokens = 0;
    for (const text::Span& sent : sents) {
        size_t n = count_tokens(seg_text.substr(sent.begin, sent.size()));
        if (!current.empty() && current_tokens + n > config.max_tokens) {
            packs.push_back(current);
            current.clear();
            current_tokens = 0;
        }
        current.push_back(sent);
        current_tokens += n;
    }
    if (!current.empty()) {
        packs.push_back(current);
    }
    if (config.merge_short && packs.size() >= 2) {
        auto pack_tokens = [&](const std::vector<text::Span>& pack) {
            size_t n = 0;
            for (const text::Span& sent : pack) {
                n += count_tokens(seg_text.substr(sent.begin, sent.size()));
            }
            return n;
        };
        // Short packs merge into their successor; a short tail, having none,
        // folds back into its predecessor.
        size_t i = 0;
        while (i + 1 < packs.size()) {
            if (pack_tokens(packs[i]) < config.min_tokens) {
                packs[i + 1].insert(packs[i + 1].begin(), packs[i].begin(), packs[i].end());
                packs.erase(packs.begin() + static_cast<ptrdiff_t>(i));
            } else {
                ++i;
            }
        }
        if (packs.size() >= 2 && pack_tokens(packs.back()) < config.min_tokens) {
            auto tail = packs.back();
            packs.pop_back();
            packs.back().insert(packs.back().end(), tail.begin(), tail.end());
        }
    }
    return packs;
}

} // namespace

Document ingest(std::string_view raw, std::string_view title, const SplitConfig& config) {
    if (text::trim(raw).empty()) {
        throw InputError("empty input document");
    }
    if (config.min_tokens == 0 || config.min_tokens >= config.max_tokens) {
        throw ConfigError("min_tokens must be positive and smaller than max_tokens");
    }
    std::vector<std::regex> patterns;
    for (const std::string& p : config.hierarchy_patterns) {
        try {
            patterns.emplace_back(p);
        } catch (const std::regex_error& e) {
            throw ConfigError("invalid hierarchy pattern '" + p + "': " + e.what());
        }
    }

    Document doc;
    doc.title = std::string(title);
    doc.raw_text = std::string(raw);
    doc.id = [&] {
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(
                          text::fnv1a(std::string(title) + "\n" + std::string(raw))));
        return std::string("doc-") + buf;
    }();

    // Carve the text into segments delimited by hierarchy markers.
    std::vector<Marker> markers = find_markers(raw, patterns);
    std::vector<Segment> segments;
    std::vector<std::string> path;
    segments.push_back({0, markers.empty() ? raw.size() : markers.front().pos, {}});
    for (size_t k = 0; k < markers.size(); ++k) {
        const Marker& m = markers[k];
        path.resize(std::min(path.size(), m.level));
        path.push_back(text::trim(m.label));
        size_t body_begin = config.headings_in_text ? m.pos : m.pos + m.len;
        size_t body_end = (k + 1 < markers.size()) ? markers[k + 1].pos : raw.size();
        segments.push_back({body_begin, body_end, path});
    }

    const std::vector<std::string>& abbrevs =
        config.abbreviations.empty() ? default_abbreviations() : config.abbreviations;

    size_t consumed = 0; // end of the previous paragraph in raw coordinates
    size_t index = 0;
    for (const Segment& seg : segments) {
        std::string_view seg_text = raw.substr(seg.begin, seg.end - seg.begin);
        std::vector<text::Span> sents = sentence_spans(seg_text, abbrevs);
        if (sents.empty()) {
            continue;
        }
        for (const std::vector<text::Span>& pack : pack_sentences(seg_text, sents, config)) {
            size_t begin = seg.begin + pack.front().begin;
            size_t end = seg.begin + pack.back().end;
            Paragraph p;
            p.doc_id = doc.id;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "-p%04zu", index++);
            p.id = doc.id + buf;
            p.heading_path = seg.heading_path;
            p.text = std::string(raw.substr(begin, end - begin));
            for (const text::Span& sent : pack) {
                p.sentences.emplace_back(
                    seg_text.substr(sent.begin, sent.size()));
            }
            p.token_count = count_tokens(p.text);
            p.leading_separator = std::string(raw.substr(consumed, begin - consumed));
            consumed = end;
            doc.paragraphs.push_back(std::move(p));
        }
    }
    doc.trailing_separator = std::string(raw.substr(consumed));
    if (doc.paragraphs.empty()) {
        throw InputError("document contains no sentences after splitting");
    }
    return doc;
}

std::string reconstruct(const Document& doc) {
    std::string out;
    out.reserve(doc.raw_text.size());
    for (const Paragraph& p : doc.paragraphs) {
        out += p.leading_separator;
        out += p.text;
    }
    out += doc.trailing_separator;
    return out;
}

std::string store_to_json(const std::vector<Paragraph>& paragraphs) {
    json arr = json::array();
    for (const Paragraph& p : paragraphs) {
        json obj;
        obj["id"] = p.id;
        obj["doc_id"] = p.doc_id;
        obj["heading_path"] = p.heading_path;
        obj["text"] = p.text;
        obj["sentences"] = p.sentences;
        obj["token_count"] = p.token_count;
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

std::vector<Paragraph> store_from_json(const std::string& json_text) {
    json arr;
    try {
        arr = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("paragraph store is not valid JSON: ") + e.what());
    }
    if (!arr.is_array()) {
        throw InputError("paragraph store must be a JSON array");
    }
    std::vector<Paragraph> out;
    for (const json& obj : arr) {
        Paragraph p;
        p.id = obj.at("id").get<std::string>();
        p.doc_id = obj.at("doc_id").get<std::string>();
        p.heading_path = obj.at("heading_path").get<std::vector<std::string>>();
        p.text = obj.at("text").get<std::string>();
        p.sentences = obj.at("sentences").get<std::vector<std::string>>();
        p.token_count = obj.at("token_count").get<size_t>();
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace docqa::corpus
