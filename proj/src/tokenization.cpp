#include "docqa/tokenization.hpp"

#include "docqa/errors.hpp"
#include "docqa/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>

namespace docqa::tokenization {

using json = nlohmann::ordered_json;

namespace {

char class_letter(TokenClass cls) {
    return cls == TokenClass::Definition ? 'X' : 'Y';
}

std::string class_name(TokenClass cls) {
    return cls == TokenClass::Definition ? "definition" : "dependency";
}

std::string source_name(TokenSource s) {
    switch (s) {
    case TokenSource::KeywordDefinition: return "keyword-definition";
    case TokenSource::Lexicon: return "lexicon";
    default: return "dependency-group";
    }
}

bool valid_token_symbol(const std::string& token, TokenClass cls) {
    if (token.size() < 2 || token[0] != class_letter(cls)) {
        return false;
    }
    if (!std::isdigit(static_cast<unsigned char>(token[1]))) {
        return false;
    }
    return std::all_of(token.begin() + 1, token.end(), [](unsigned char c) {
        return std::isalnum(c) != 0;
    });
}

} // namespace

std::string TokenRegistry::register_phrase(std::string_view phrase, TokenClass cls,
                                           TokenSource source) {
    std::string canonical = text::canonical_phrase(phrase);
    if (canonical.empty()) {
        throw ArgumentError("cannot register an empty phrase");
    }
    auto it = entries_.find(canonical);
    if (it != entries_.end()) {
        it->second.surface_forms.insert(std::string(phrase));
        return it->second.token;
    }

    size_t& next_id = cls == TokenClass::Definition ? next_definition_id_ : next_dependency_id_;
    std::string token;
    do {
        std::string letter(1, class_letter(cls));
        token = letter + "1" + letter + std::to_string(next_id++);
    } while (reverse_.count(token) > 0);

    TokenEntry entry;
    entry.token = token;
    entry.phrase = canonical;
    entry.surface_forms.insert(std::string(phrase));
    entry.cls = cls;
    entry.source = source;
    reverse_[token] = canonical;
    entries_[canonical] = std::move(entry);
    return token;
}

void TokenRegistry::insert(TokenEntry entry) {
    entry.phrase = text::canonical_phrase(entry.phrase);
    if (entry.phrase.empty()) {
        throw ArgumentError("cannot insert an entry with an empty phrase");
    }
    if (!valid_token_symbol(entry.token, entry.cls)) {
        throw ValidationError("token '" + entry.token + "' does not match the " +
                              class_name(entry.cls) + " class format");
    }
    if (reverse_.count(entry.token) > 0) {
        throw ValidationError("token '" + entry.token + "' is already registered");
    }
    if (entries_.count(entry.phrase) > 0) {
        throw ValidationError("phrase '" + entry.phrase + "' is already registered");
    }
    reverse_[entry.token] = entry.phrase;
    entries_[entry.phrase] = std::move(entry);
}

std::optional<std::string> TokenRegistry::token_for(std::string_view phrase) const {
    auto it = entries_.find(text::canonical_phrase(phrase));
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second.token;
}

std::optional<std::string> TokenRegistry::phrase_for(std::string_view token) const {
    auto it = reverse_.find(std::string(token));
    if (it == reverse_.end()) {
        return std::nullopt;
    }
    return it->second;
}

bool TokenRegistry::has_token(std::string_view token) const {
    return reverse_.count(std::string(token)) > 0;
}

void TokenRegistry::record_surface(std::string_view token, std::string_view surface) {
    auto it = reverse_.find(std::string(token));
    if (it != reverse_.end()) {
        entries_[it->second].surface_forms.insert(std::string(surface));
    }
}

std::string TokenRegistry::to_json() const {
    json arr = json::array();
    for (const auto& [phrase, entry] : entries_) {
        json obj;
        obj["token"] = entry.token;
        obj["phrase"] = entry.phrase;
        obj["surface_forms"] = entry.surface_forms;
        obj["class"] = class_name(entry.cls);
        obj["source"] = source_name(entry.source);
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

TokenRegistry TokenRegistry::from_json(const std::string& json_text) {
    json arr;
    try {
        arr = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("registry file is not valid JSON: ") + e.what());
    }
    if (!arr.is_array()) {
        throw InputError("registry file must be a JSON array");
    }
    TokenRegistry reg;
    size_t max_def = 0;
    size_t max_dep = 0;
    for (const json& obj : arr) {
        TokenEntry entry;
        entry.token = obj.at("token").get<std::string>();
        entry.phrase = obj.at("phrase").get<std::string>();
        if (obj.contains("surface_forms")) {
            for (const json& s : obj["surface_forms"]) {
                entry.surface_forms.insert(s.get<std::string>());
            }
        }
        std::string cls = obj.value("class", "definition");
        entry.cls = cls == "dependency" ? TokenClass::Dependency : TokenClass::Definition;
        std::string src = obj.value("source", "keyword-definition");
        entry.source = src == "lexicon"              ? TokenSource::Lexicon
                       : src == "dependency-group"   ? TokenSource::DependencyGroup
                                                     : TokenSource::KeywordDefinition;
        // Keep minting clear of imported X1X{n}/Y1Y{n} symbols.
        const std::string& t = entry.token;
        if (t.size() > 3 && t.substr(0, 3) == (entry.cls == TokenClass::Definition ? "X1X" : "Y1Y")) {
            size_t n = 0;
            try {
                n = std::stoul(t.substr(3));
            } catch (...) {
                n = 0;
            }
            (entry.cls == TokenClass::Definition ? max_def : max_dep) =
                std::max(entry.cls == TokenClass::Definition ? max_def : max_dep, n);
        }
        reg.insert(std::move(entry));
    }
    reg.next_definition_id_ = max_def + 1;
    reg.next_dependency_id_ = max_dep + 1;
    return reg;
}

std::set<std::string> default_definition_keywords() {
    return {"mean", "means", "defined", "define", "defines"};
}

// ---------------------------------------------------------------------------
// Phrase matching
// ---------------------------------------------------------------------------

namespace {

struct PhrasePattern {
    std::vector<std::string> words; // canonical words
    std::string token;
};

// Canonical longest-match-first, left-to-right, non-overlapping replacement
// over the word stream of `source`. Matched spans are replaced by the token
// symbol; everything between matches is copied verbatim.
std::string replace_in_text(std::string_view source,
                            const std::vector<PhrasePattern>& patterns,
                            TokenRegistry* record_surfaces) {
    if (patterns.empty()) {
        return std::string(source);
    }
    std::unordered_map<std::string, std::vector<const PhrasePattern*>> by_first;
    for (const PhrasePattern& p : patterns) {
        by_first[p.words.front()].push_back(&p);
    }
    for (auto& [word, list] : by_first) {
        std::sort(list.begin(), list.end(), [](const PhrasePattern* a, const PhrasePattern* b) {
            return a->words.size() > b->words.size();
        });
    }

    std::vector<text::Span> spans = text::word_spans(source);
    std::vector<std::string> folded(spans.size());
    for (size_t i = 0; i < spans.size(); ++i) {
        folded[i] = text::casefold(source.substr(spans[i].begin, spans[i].size()));
    }

    std::string out;
    out.reserve(source.size());
    size_t copied = 0;
    size_t i = 0;
    while (i < spans.size()) {
        auto it = by_first.find(folded[i]);
        const PhrasePattern* matched = nullptr;
        if (it != by_first.end()) {
            for (const PhrasePattern* p : it->second) {
                if (i + p->words.size() > spans.size()) {
                    continue;
                }
                bool ok = true;
                for (size_t k = 1; k < p->words.size(); ++k) {
                    if (folded[i + k] != p->words[k]) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    matched = p;
                    break;
                }
            }
        }
        if (matched == nullptr) {
            ++i;
            continue;
        }
        size_t begin = spans[i].begin;
        size_t end = spans[i + matched->words.size() - 1].end;
        out.append(source.substr(copied, begin - copied));
        out.append(matched->token);
        if (record_surfaces != nullptr) {
            record_surfaces->record_surface(matched->token,
                                            std::string(source.substr(begin, end - begin)));
        }
        copied = end;
        i += matched->words.size();
    }
    out.append(source.substr(copied));
    return out;
}

std::vector<PhrasePattern> patterns_from_entries(const TokenRegistry& registry) {
    std::vector<PhrasePattern> patterns;
    for (const auto& [phrase, entry] : registry.entries()) {
        PhrasePattern p;
        p.words = text::words(phrase);
        p.token = entry.token;
        if (!p.words.empty()) {
            patterns.push_back(std::move(p));
        }
    }
    return patterns;
}

corpus::Paragraph retokenized(const corpus::Paragraph& p, std::string new_text) {
    corpus::Paragraph out = p;
    out.text = std::move(new_text);
    out.sentences = corpus::segment_sentences(out.text);
    out.token_count = corpus::count_tokens(out.text);
    return out;
}

} // namespace

std::vector<DefinitionSentence> find_definitions(const corpus::Document& doc,
                                                 const std::set<std::string>& keywords,
                                                 dependency::Provider& provider) {
    if (keywords.empty()) {
        throw ArgumentError("find_definitions requires at least one keyword");
    }
    std::set<std::string> folded_keywords;
    for (const std::string& k : keywords) {
        folded_keywords.insert(text::casefold(k));
    }

    std::vector<DefinitionSentence> out;
    for (const corpus::Paragraph& para : doc.paragraphs) {
        for (size_t s = 0; s < para.sentences.size(); ++s) {
            const std::string& sentence = para.sentences[s];
            bool has_keyword = false;
            for (const std::string& w : text::words(text::casefold(sentence))) {
                if (folded_keywords.count(w) > 0) {
                    has_keyword = true;
                    break;
                }
            }
            if (!has_keyword) {
                continue;
            }
            dependency::DependencyGraph graph;
            try {
                graph = provider.parse(sentence);
            } catch (const std::exception&) {
                continue; // unparseable sentences simply yield no definitions
            }

            for (const dependency::DepNode& node : graph.nodes) {
                if (folded_keywords.count(text::casefold(node.form)) == 0) {
                    continue;
                }
                bool governing = node.deprel == "root" ||
                                 (node.upos == "VERB" &&
                                  (node.deprel == "conj" || node.deprel == "ccomp" ||
                                   node.deprel == "advcl" || node.deprel == "parataxis"));
                if (!governing) {
                    continue;
                }
                // Subject subtree of the keyword verb.
                const dependency::DepNode* subj = nullptr;
                for (const dependency::DepNode& cand : graph.nodes) {
                    if (cand.head == node.index &&
                        (cand.deprel == "nsubj" || cand.deprel == "nsubj:pass")) {
                        subj = &cand;
                        break;
                    }
                }
                if (subj == nullptr) {
                    continue;
                }
                std::vector<size_t> subtree = graph.subtree(subj->index);
                size_t lo = subtree.front();
                size_t hi = subtree.back();
                std::string phrase;
                for (size_t idx = lo; idx <= hi; ++idx) {
                    if (!phrase.empty()) {
                        phrase += ' ';
                    }
                    phrase += graph.nodes[idx - 1].form;
                }
                DefinitionSentence def;
                def.paragraph_id = para.id;
                def.sentence_index = s;
                def.trigger_keyword = node.form;
                def.span_begin = lo - 1;
                def.span_end = hi;
                def.subject_phrase = phrase;
                out.push_back(std::move(def));
                break; // one definition per sentence
            }
        }
    }
    return out;
}

corpus::Document apply_definition_tokenization(const corpus::Document& doc,
                                               TokenRegistry& registry,
                                               const std::vector<DefinitionSentence>& defs,
                                               const std::vector<std::string>& lexicon) {
    std::vector<PhrasePattern> patterns;
    auto add_pattern = [&](std::string_view phrase, TokenSource source) {
        std::string token = registry.register_phrase(phrase, TokenClass::Definition, source);
        PhrasePattern p;
        p.words = text::words(text::canonical_phrase(phrase));
        p.token = std::move(token);
        if (!p.words.empty()) {
            for (const PhrasePattern& existing : patterns) {
                if (existing.token == p.token) {
                    return;
                }
            }
            patterns.push_back(std::move(p));
        }
    };
    for (const DefinitionSentence& def : defs) {
        add_pattern(def.subject_phrase, TokenSource::KeywordDefinition);
    }
    for (const std::string& phrase : lexicon) {
        add_pattern(phrase, TokenSource::Lexicon);
    }

    corpus::Document out = doc;
    for (corpus::Paragraph& para : out.paragraphs) {
        std::string replaced = replace_in_text(para.text, patterns, &registry);
        if (replaced != para.text) {
            para = retokenized(para, std::move(replaced));
        }
    }
    out.raw_text = corpus::reconstruct(out);
    return out;
}

// ---------------------------------------------------------------------------
// Dependency tokenization
// ---------------------------------------------------------------------------

namespace {

// Character spans of each parse token inside `sentence`, located by
// sequential search. Returns false when the forms cannot be aligned.
bool locate_tokens(std::string_view sentence, const dependency::DependencyGraph& graph,
                   std::vector<text::Span>& spans) {
    spans.clear();
    size_t cursor = 0;
    for (const dependency::DepNode& node : graph.nodes) {
        size_t pos = sentence.find(node.form, cursor);
        if (pos == std::string_view::npos) {
            return false;
        }
        spans.push_back({pos, pos + node.form.size()});
        cursor = pos + node.form.size();
    }
    return true;
}

struct Group {
    size_t lo = 0; // 1-based node indices, inclusive
    size_t hi = 0;
};

// Subject and object groups of the root verb (objects may hang off the
// xcomp chain). Only contiguous groups containing at least one content word
// and no already-minted token symbol are kept.
std::vector<Group> collect_groups(const dependency::DependencyGraph& graph,
                                  const TokenRegistry& registry) {
    std::vector<Group> groups;
    const dependency::DepNode* root = graph.root();
    if (root == nullptr || graph.degraded || root->upos != "VERB") {
        return groups;
    }
    std::vector<size_t> chain{root->index};
    for (const dependency::DepNode& n : graph.nodes) {
        if (n.deprel == "xcomp" &&
            std::find(chain.begin(), chain.end(), n.head) != chain.end()) {
            chain.push_back(n.index);
        }
    }

    auto try_add = [&](size_t head_index) {
        std::vector<size_t> subtree = graph.subtree(head_index);
        if (subtree.size() != subtree.back() - subtree.front() + 1) {
            return; // non-contiguous subtree, leave the sentence alone
        }
        bool has_content = false;
        for (size_t idx : subtree) {
            const dependency::DepNode& n = graph.nodes[idx - 1];
            if (registry.has_token(n.form)) {
                return; // already tokenized in an earlier pass
            }
            if (n.upos == "NOUN" || n.upos == "PROPN" || n.upos == "X" || n.upos.empty()) {
                has_content = true;
            }
        }
        if (!has_content) {
            return;
        }
        groups.push_back({subtree.front(), subtree.back()});
    };

    for (const dependency::DepNode& n : graph.nodes) {
        bool on_chain = std::find(chain.begin(), chain.end(), n.head) != chain.end();
        if (!on_chain) {
            continue;
        }
        if (n.deprel == "nsubj" || n.deprel == "nsubj:pass" || n.deprel == "obj" ||
            n.deprel == "iobj") {
            try_add(n.index);
        }
    }
    std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
        return a.lo < b.lo;
    });
    // Drop overlapping groups, keeping the earlier one.
    std::vector<Group> kept;
    for (const Group& g : groups) {
        if (kept.empty() || g.lo > kept.back().hi) {
            kept.push_back(g);
        }
    }
    return kept;
}

} // namespace

DependencyTokenizationResult apply_dependency_tokenization(const corpus::Document& doc,
                                                           TokenRegistry& registry,
                                                           dependency::Provider& provider) {
    DependencyTokenizationResult result;
    result.doc = doc;

    for (corpus::Paragraph& para : result.doc.paragraphs) {
        bool changed = false;
        std::vector<std::string> new_sentences = para.sentences;
        for (size_t s = 0; s < new_sentences.size(); ++s) {
            const std::string sentence = new_sentences[s];
            dependency::DependencyGraph graph;
            try {
                graph = provider.parse(sentence);
            } catch (const std::exception& e) {
                result.warnings.push_back({para.id, s, e.what()});
                continue;
            }
            std::vector<Group> groups = collect_groups(graph, registry);
            if (groups.empty()) {
                continue;
            }
            std::vector<text::Span> spans;
            if (!locate_tokens(sentence, graph, spans)) {
                result.warnings.push_back({para.id, s, "parse tokens do not align with sentence"});
                continue;
            }
            std::string rebuilt;
            size_t copied = 0;
            for (const Group& g : groups) {
                size_t begin = spans[g.lo - 1].begin;
                size_t end = spans[g.hi - 1].end;
                std::string surface(sentence.substr(begin, end - begin));
                std::string token = registry.register_phrase(
                    surface, TokenClass::Dependency, TokenSource::DependencyGroup);
                rebuilt.append(sentence, copied, begin - copied);
                rebuilt.append(token);
                copied = end;
            }
            rebuilt.append(sentence, copied, sentence.size() - copied);
            if (rebuilt != sentence) {
                new_sentences[s] = rebuilt;
                changed = true;
            }
        }
        if (!changed) {
            continue;
        }
        // Splice the rewritten sentences back into the paragraph text.
        std::string new_text;
        size_t cursor = 0;
        for (size_t s = 0; s < para.sentences.size(); ++s) {
            size_t pos = para.text.find(para.sentences[s], cursor);
            if (pos == std::string::npos) {
                pos = cursor;
            }
            new_text.append(para.text, cursor, pos - cursor);
            new_text.append(new_sentences[s]);
            cursor = pos + para.sentences[s].size();
        }
        new_text.append(para.text, cursor, para.text.size() - cursor);
        para.text = std::move(new_text);
        para.sentences = std::move(new_sentences);
        para.token_count = corpus::count_tokens(para.text);
    }
    result.doc.raw_text = corpus::reconstruct(result.doc);
    return result;
}

std::string replace_registered(std::string_view text, const TokenRegistry& registry) {
    return replace_in_text(text, patterns_from_entries(registry), nullptr);
}

std::string detokenize(std::string_view source, const TokenRegistry& registry) {
    std::vector<text::Span> spans = text::word_spans(source);
    std::string out;
    out.reserve(source.size());
    size_t copied = 0;
    for (const text::Span& span : spans) {
        std::string word(source.substr(span.begin, span.size()));
        std::optional<std::string> phrase = registry.phrase_for(word);
        if (!phrase) {
            continue;
        }
        out.append(source.substr(copied, span.begin - copied));
        out.append(*phrase);
        copied = span.end;
    }
    out.append(source.substr(copied));
    return out;
}

std::vector<std::string> parse_lexicon(std::string_view content) {
    std::vector<std::string> phrases;
    std::istringstream in{std::string(content)};
    std::string line;
    while (std::getline(in, line)) {
        std::string phrase = text::trim(line);
        if (!phrase.empty() && phrase[0] != '#') {
            phrases.push_back(phrase);
        }
    }
    return phrases;
}

std::string warnings_to_jsonl(const std::vector<TokenizationWarning>& warnings) {
    std::string out;
    for (const TokenizationWarning& w : warnings) {
        json obj;
        obj["paragraph_id"] = w.paragraph_id;
        obj["sentence_index"] = w.sentence_index;
        obj["reason"] = w.reason;
        out += obj.dump() + "\n";
    }
    return out;
}

} // namespace docqa::tokenization
