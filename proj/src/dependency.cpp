#include "docqa/dependency.hpp"

#include "docqa/errors.hpp"
#include "docqa/text.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace docqa::dependency {

using json = nlohmann::json;

const DepNode* DependencyGraph::root() const {
    for (const DepNode& n : nodes) {
        if (n.head == 0) {
            return &n;
        }
    }
    return nullptr;
}

std::vector<size_t> DependencyGraph::subtree(size_t index) const {
    std::vector<std::vector<size_t>> children(nodes.size() + 1);
    for (const DepNode& n : nodes) {
        if (n.head != 0) {
            children[n.head].push_back(n.index);
        }
    }
    std::vector<size_t> out;
    std::vector<size_t> stack{index};
    while (!stack.empty()) {
        size_t cur = stack.back();
        stack.pop_back();
        out.push_back(cur);
        for (size_t child : children[cur]) {
            stack.push_back(child);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

void validate(const DependencyGraph& graph) {
    if (graph.nodes.empty()) {
        throw ValidationError("dependency graph has no nodes");
    }
    size_t roots = 0;
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        const DepNode& n = graph.nodes[i];
        if (n.index != i + 1) {
            throw ValidationError("node indices must be consecutive from 1");
        }
        if (n.head > graph.nodes.size()) {
            throw ValidationError("node " + std::to_string(n.index) + " has head out of range");
        }
        if (n.head == 0) {
            ++roots;
        }
    }
    if (roots != 1) {
        throw ValidationError("graph must have exactly one root, found " + std::to_string(roots));
    }
    // Follow heads from every node; more steps than nodes means a cycle.
    for (const DepNode& n : graph.nodes) {
        size_t cur = n.index;
        size_t steps = 0;
        while (cur != 0) {
            cur = graph.nodes[cur - 1].head;
            if (++steps > graph.nodes.size()) {
                throw ValidationError("cyclic head chain at node " + std::to_string(n.index));
            }
        }
    }
}

std::string normalize_deprel(std::string_view deprel) {
    static const std::map<std::string, std::string, std::less<>> aliases = {
        {"dobj", "obj"},        {"nsubjpass", "nsubj:pass"}, {"csubjpass", "csubj:pass"},
        {"auxpass", "aux:pass"}, {"mwe", "fixed"},           {"neg", "advmod"},
        {"prep", "case"},        {"pobj", "obl"},
    };
    auto it = aliases.find(deprel);
    return it == aliases.end() ? std::string(deprel) : it->second;
}

// ---------------------------------------------------------------------------
// CoNLL-U
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> cols;
    size_t begin = 0;
    while (true) {
        size_t tab = line.find('\t', begin);
        if (tab == std::string::npos) {
            cols.push_back(line.substr(begin));
            break;
        }
        cols.push_back(line.substr(begin, tab - begin));
        begin = tab + 1;
    }
    return cols;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c) != 0;
    });
}

} // namespace

std::vector<DependencyGraph> read_conllu(std::string_view content) {
    std::vector<DependencyGraph> graphs;
    DependencyGraph current;
    size_t line_no = 0;
    std::istringstream in{std::string(content)};
    std::string line;

    auto flush = [&] {
        if (!current.nodes.empty()) {
            validate(current);
            graphs.push_back(std::move(current));
        }
        current = DependencyGraph{};
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            flush();
            continue;
        }
        if (line[0] == '#') {
            size_t eq = line.find("sent_id");
            if (eq != std::string::npos) {
                size_t val = line.find('=', eq);
                if (val != std::string::npos) {
                    current.sentence_id = text::trim(line.substr(val + 1));
                }
            }
            continue;
        }
        std::vector<std::string> cols = split_tabs(line);
        if (cols.size() != 10) {
            throw ParseError("expected 10 tab-separated columns, got " +
                                 std::to_string(cols.size()),
                             line_no);
        }
        const std::string& id = cols[0];
        if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) {
            continue; // multiword-token range or empty node
        }
        if (!all_digits(id)) {
            throw ParseError("token id must be an integer, got '" + id + "'", line_no);
        }
        DepNode node;
        node.index = static_cast<size_t>(std::stoul(id));
        node.form = cols[1];
        node.lemma = cols[2] == "_" ? cols[1] : cols[2];
        node.upos = cols[3];
        if (!all_digits(cols[6])) {
            throw ParseError("head must be an integer, got '" + cols[6] + "'", line_no);
        }
        node.head = static_cast<size_t>(std::stoul(cols[6]));
        node.deprel = normalize_deprel(cols[7]);
        current.nodes.push_back(std::move(node));
    }
    flush();
    return graphs;
}

std::string write_conllu(const std::vector<DependencyGraph>& graphs) {
    std::ostringstream out;
    for (const DependencyGraph& g : graphs) {
        if (!g.sentence_id.empty()) {
            out << "# sent_id = " << g.sentence_id << "\n";
        }
        for (const DepNode& n : g.nodes) {
            out << n.index << '\t' << n.form << '\t' << (n.lemma.empty() ? "_" : n.lemma) << '\t'
                << (n.upos.empty() ? "_" : n.upos) << '\t' << "_" << '\t' << "_" << '\t' << n.head
                << '\t' << (n.deprel.empty() ? "_" : n.deprel) << '\t' << "_" << '\t' << "_"
                << "\n";
        }
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Heuristic parser
// ---------------------------------------------------------------------------

HeuristicLexicon HeuristicLexicon::defaults() {
    HeuristicLexicon lex;
    lex.verbs = {"mean",     "means",    "meant",    "define",   "defines",  "defined",
                 "submit",   "submits",  "submitted","file",     "files",    "filed",
                 "need",     "needs",    "needed",   "require",  "requires", "required",
                 "include",  "includes", "included", "apply",    "applies",  "applied",
                 "maintain", "maintains","provide",  "provides", "provided", "establish",
                 "establishes","issue",  "issues",   "issued",   "refer",    "refers",
                 "describe", "describes","hold",     "holds",    "held",     "govern",
                 "governs",  "prohibit", "prohibits","obey",     "review",   "reviews",
                 "retain",   "retains",  "notify",   "notifies", "designate","designates",
                 "ensure",   "ensures",  "determine","determines"};
    lex.auxiliaries = {"is",   "are",  "was",   "were",  "be",    "been",  "being", "am",
                       "has",  "have", "had",   "do",    "does",  "did",   "will",  "would",
                       "shall","should","may",  "might", "must",  "can",   "could", "not"};
    lex.determiners = {"a",    "an",   "the",  "this", "that",  "these", "those", "such",
                       "its",  "their","his",  "her",  "any",   "each",  "every", "no",
                       "some", "all",  "both", "either","neither"};
    lex.prepositions = {"of",    "in",     "on",      "at",      "by",     "for",   "with",
                        "from",  "to",     "between", "under",   "over",   "after", "before",
                        "during","within", "without", "against", "into",   "through","upon",
                        "per",   "pursuant","about",  "above",   "below",  "across","as"};
    lex.conjunctions = {"and", "or", "nor"};
    return lex;
}

HeuristicLexicon HeuristicLexicon::from_directory(const std::string& dir) {
    auto load = [&](const std::string& name, std::vector<std::string>& target) {
        std::string content = text::read_file(dir + "/" + name);
        std::vector<std::string> entries;
        std::istringstream in(content);
        std::string line;
        while (std::getline(in, line)) {
            std::string w = text::trim(line);
            if (!w.empty() && w[0] != '#') {
                entries.push_back(text::casefold(w));
            }
        }
        if (!entries.empty()) {
            target = std::move(entries);
        }
    };
    HeuristicLexicon lex = defaults();
    load("verbs.txt", lex.verbs);
    load("auxiliaries.txt", lex.auxiliaries);
    load("determiners.txt", lex.determiners);
    load("prepositions.txt", lex.prepositions);
    return lex;
}

namespace {

enum class Tag { Verb, Aux, Det, Prep, Conj, Punct, Other };

bool contains(const std::vector<std::string>& lex, const std::string& w) {
    return std::find(lex.begin(), lex.end(), w) != lex.end();
}

bool is_punct_token(const std::string& t) {
    return !t.empty() && !std::any_of(t.begin(), t.end(), [](unsigned char c) {
        return text::is_word_char(c);
    });
}

} // namespace

DependencyGraph heuristic_parse(const std::vector<std::string>& tokens,
                                const HeuristicLexicon& lexicon) {
    if (tokens.empty()) {
        throw ArgumentError("heuristic_parse requires a non-empty token sequence");
    }

    const size_t n = tokens.size();
    std::vector<Tag> tags(n, Tag::Other);
    std::vector<std::string> folded(n);
    for (size_t i = 0; i < n; ++i) {
        folded[i] = text::casefold(tokens[i]);
        if (is_punct_token(tokens[i])) {
            tags[i] = Tag::Punct;
        } else if (contains(lexicon.verbs, folded[i])) {
            tags[i] = Tag::Verb;
        } else if (contains(lexicon.auxiliaries, folded[i])) {
            tags[i] = Tag::Aux;
        } else if (contains(lexicon.conjunctions, folded[i])) {
            tags[i] = Tag::Conj;
        } else if (contains(lexicon.determiners, folded[i])) {
            tags[i] = Tag::Det;
        } else if (contains(lexicon.prepositions, folded[i])) {
            tags[i] = Tag::Prep;
        }
    }
    // "to" right before a verb is the infinitive marker, not a preposition.
    for (size_t i = 0; i + 1 < n; ++i) {
        if (folded[i] == "to" && tags[i + 1] == Tag::Verb) {
            tags[i] = Tag::Aux;
        }
    }

    DependencyGraph g;
    g.nodes.resize(n);
    for (size_t i = 0; i < n; ++i) {
        g.nodes[i].index = i + 1;
        g.nodes[i].form = tokens[i];
        g.nodes[i].lemma = folded[i];
    }

    auto upos_of = [](Tag t) -> std::string {
        switch (t) {
        case Tag::Verb: return "VERB";
        case Tag::Aux: return "AUX";
        case Tag::Det: return "DET";
        case Tag::Prep: return "ADP";
        case Tag::Conj: return "CCONJ";
        case Tag::Punct: return "PUNCT";
        default: return "NOUN";
        }
    };
    for (size_t i = 0; i < n; ++i) {
        g.nodes[i].upos = upos_of(tags[i]);
    }

    size_t root = n; // index into tokens, n = none
    for (size_t i = 0; i < n; ++i) {
        if (tags[i] == Tag::Verb) {
            root = i;
            break;
        }
    }

    if (root == n) {
        // Degraded mode: root the last content token, attach the rest flat.
        size_t last = n;
        for (size_t i = n; i-- > 0;) {
            if (tags[i] != Tag::Punct) {
                last = i;
                break;
            }
        }
        if (last == n) {
            last = n - 1;
        }
        g.nodes[last].head = 0;
        g.nodes[last].deprel = "root";
        for (size_t i = 0; i < n; ++i) {
            if (i == last) {
                continue;
            }
            g.nodes[i].head = last + 1;
            g.nodes[i].deprel = tags[i] == Tag::Punct ? "punct" : "compound";
        }
        g.degraded = true;
        validate(g);
        return g;
    }

    g.nodes[root].head = 0;
    g.nodes[root].deprel = "root";

    // The verb chain: verbs/auxiliaries/markers following the root stay a
    // spine ("need to submit"); later object runs hang off the last verb.
    size_t last_verb = root;
    for (size_t i = root + 1; i < n; ++i) {
        if (tags[i] == Tag::Verb) {
            g.nodes[i].head = last_verb + 1;
            g.nodes[i].deprel = "xcomp";
            last_verb = i;
        } else if (tags[i] == Tag::Aux && i + 1 < n &&
                   (tags[i + 1] == Tag::Verb || tags[i + 1] == Tag::Aux)) {
            g.nodes[i].head = last_verb + 1;
            g.nodes[i].deprel = "mark";
        } else {
            break;
        }
    }

    // Group a maximal contiguous run [begin, end) under its last word, which
    // attaches to `attach` with `rel`.
    auto attach_run = [&](size_t begin, size_t end, size_t attach, const std::string& rel) {
        size_t head = end - 1;
        g.nodes[head].head = attach + 1;
        g.nodes[head].deprel = rel;
        for (size_t i = begin; i < end; ++i) {
            if (i == head) {
                continue;
            }
            g.nodes[i].head = head + 1;
            switch (tags[i]) {
            case Tag::Det: g.nodes[i].deprel = "det"; break;
            case Tag::Conj: g.nodes[i].deprel = "cc"; break;
            case Tag::Aux: g.nodes[i].deprel = "aux"; break;
            default: g.nodes[i].deprel = "compound"; break;
            }
        }
    };

    auto run_breaks_at = [&](size_t i) {
        return tags[i] == Tag::Verb || tags[i] == Tag::Prep || tags[i] == Tag::Punct ||
               tags[i] == Tag::Aux;
    };

    // Runs before the root attach as subjects.
    {
        size_t i = 0;
        while (i < root) {
            if (run_breaks_at(i)) {
                if (tags[i] == Tag::Prep) {
                    g.nodes[i].head = root + 1;
                    g.nodes[i].deprel = "case";
                } else if (g.nodes[i].head == 0 && i != root) {
                    g.nodes[i].head = root + 1;
                    g.nodes[i].deprel = tags[i] == Tag::Punct ? "punct" : "aux";
                }
                ++i;
                continue;
            }
            size_t begin = i;
            while (i < root && !run_breaks_at(i)) {
                ++i;
            }
            attach_run(begin, i, root, "nsubj");
        }
    }

    // Runs after the verb chain attach as objects.
    {
        size_t i = last_verb + 1;
        while (i < n) {
            if (run_breaks_at(i)) {
                if (g.nodes[i].head == 0 && i != root) {
                    g.nodes[i].head = last_verb + 1;
                    g.nodes[i].deprel = tags[i] == Tag::Prep    ? "case"
                                        : tags[i] == Tag::Punct ? "punct"
                                        : tags[i] == Tag::Verb  ? "conj"
                                                                : "aux";
                }
                ++i;
                continue;
            }
            size_t begin = i;
            while (i < n && !run_breaks_at(i)) {
                ++i;
            }
            attach_run(begin, i, last_verb, "obj");
        }
    }

    // Anything left unattached (e.g. stray tokens between root and chain)
    // leans on the root.
    for (size_t i = 0; i < n; ++i) {
        if (i != root && g.nodes[i].head == 0) {
            g.nodes[i].head = root + 1;
            g.nodes[i].deprel = tags[i] == Tag::Punct ? "punct" : "dep";
        }
    }

    validate(g);
    return g;
}

std::vector<std::string> parser_tokens(std::string_view sentence) {
    std::vector<std::string> tokens;
    size_t i = 0;
    while (i < sentence.size()) {
        unsigned char c = static_cast<unsigned char>(sentence[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (text::is_word_char(c)) {
            size_t begin = i;
            while (i < sentence.size() &&
                   text::is_word_char(static_cast<unsigned char>(sentence[i]))) {
                ++i;
            }
            tokens.emplace_back(sentence.substr(begin, i - begin));
        } else {
            tokens.emplace_back(1, sentence[i]);
            ++i;
        }
    }
    return tokens;
}

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

namespace {

std::string sentence_key(const std::vector<std::string>& forms) {
    std::string key;
    for (const std::string& f : forms) {
        for (char c : text::casefold(f)) {
            if (text::is_word_char(static_cast<unsigned char>(c))) {
                key.push_back(c);
            }
        }
    }
    return key;
}

class ConlluProvider : public Provider {
public:
    explicit ConlluProvider(std::string_view content) {
        for (DependencyGraph& g : read_conllu(content)) {
            std::vector<std::string> forms;
            forms.reserve(g.nodes.size());
            for (const DepNode& n : g.nodes) {
                forms.push_back(n.form);
            }
            by_key_.emplace(sentence_key(forms), std::move(g));
        }
    }

    DependencyGraph parse(std::string_view sentence) override {
        auto it = by_key_.find(sentence_key(parser_tokens(sentence)));
        if (it == by_key_.end()) {
            throw InputError("no parse available for sentence: " +
                             std::string(sentence.substr(0, 60)));
        }
        return it->second;
    }

private:
    std::unordered_map<std::string, DependencyGraph> by_key_;
};

class RemoteProvider : public Provider {
public:
    RemoteProvider(std::string endpoint, int timeout_seconds, int retries)
        : endpoint_(std::move(endpoint)), timeout_(timeout_seconds), retries_(retries) {}

    DependencyGraph parse(std::string_view sentence) override {
        json req;
        req["sentence"] = std::string(sentence);
        const std::string body = req.dump();

        std::string last_error;
        for (int attempt = 0; attempt <= retries_; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(100 * attempt));
            }
            httplib::Client client(endpoint_);
            client.set_connection_timeout(timeout_);
            client.set_read_timeout(timeout_);
            auto res = client.Post("/parse", body, "application/json");
            if (!res) {
                last_error = httplib::to_string(res.error());
                continue;
            }
            if (res->status != 200) {
                throw ProtocolError("parser service returned status " +
                                    std::to_string(res->status));
            }
            return graph_from_response(res->body);
        }
        throw TransportError("parser service unreachable at " + endpoint_ + ": " + last_error);
    }

private:
    static DependencyGraph graph_from_response(const std::string& body) {
        json root;
        try {
            root = json::parse(body);
        } catch (const json::parse_error&) {
            throw ProtocolError("parser service response is not valid JSON");
        }
        if (!root.contains("nodes") || !root["nodes"].is_array()) {
            throw ProtocolError("parser service response missing \"nodes\"");
        }
        DependencyGraph g;
        for (const json& jn : root["nodes"]) {
            DepNode n;
            n.index = jn.at("index").get<size_t>();
            n.form = jn.at("form").get<std::string>();
            n.lemma = jn.value("lemma", n.form);
            n.upos = jn.value("upos", "");
            n.head = jn.at("head").get<size_t>();
            n.deprel = normalize_deprel(jn.value("deprel", ""));
            g.nodes.push_back(std::move(n));
        }
        try {
            validate(g);
        } catch (const ValidationError& e) {
            throw ProtocolError(std::string("parser service returned an invalid graph: ") +
                                e.what());
        }
        return g;
    }

    std::string endpoint_;
    int timeout_;
    int retries_;
};

class HeuristicProvider : public Provider {
public:
    explicit HeuristicProvider(HeuristicLexicon lexicon) : lexicon_(std::move(lexicon)) {}

    DependencyGraph parse(std::string_view sentence) override {
        return heuristic_parse(parser_tokens(sentence), lexicon_);
    }

private:
    HeuristicLexicon lexicon_;
};

} // namespace

std::unique_ptr<Provider> make_conllu_provider(std::string_view conllu_content) {
    return std::make_unique<ConlluProvider>(conllu_content);
}

std::unique_ptr<Provider> make_remote_provider(const std::string& endpoint, int timeout_seconds,
                                               int retries) {
    return std::make_unique<RemoteProvider>(endpoint, timeout_seconds, retries);
}

std::unique_ptr<Provider> make_heuristic_provider(HeuristicLexicon lexicon) {
    return std::make_unique<HeuristicProvider>(std::move(lexicon));
}

} // namespace docqa::dependency
