#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace docqa::dependency {

struct DepNode {
    size_t index = 0; // 1-based
    std::string form;
    std::string lemma;
    std::string upos;
    size_t head = 0; // 0 = root
    std::string deprel;
};

struct DependencyGraph {
    std::string sentence_id;
    std::vector<DepNode> nodes;
    // Set by the heuristic provider when no verb could be found and the graph
    // was rooted at the last token instead.
    bool degraded = false;

    const DepNode* root() const;
    // 1-based indices of the full subtree under `index` (inclusive), sorted.
    std::vector<size_t> subtree(size_t index) const;
};

// Checks the graph invariants: consecutive 1-based indices, exactly one
// root, heads in range, no cycles. Throws ValidationError.
void validate(const DependencyGraph& graph);

// Maps legacy relation labels onto Universal Dependencies names
// ("dobj" -> "obj", "nsubjpass" -> "nsubj:pass", ...).
std::string normalize_deprel(std::string_view deprel);

// ---------------------------------------------------------------------------
// CoNLL-U interchange
// ---------------------------------------------------------------------------

// One graph per sentence block. Comment lines are kept only as sentence ids
// (# sent_id = ...); multiword-token ranges and empty nodes are skipped.
std::vector<DependencyGraph> read_conllu(std::string_view content);
std::string write_conllu(const std::vector<DependencyGraph>& graphs);

// ---------------------------------------------------------------------------
// Heuristic shallow parser
// ---------------------------------------------------------------------------

// Closed-class word lists used by the heuristic provider. The defaults cover
// the regulation-domain vocabulary; each list can be replaced from a
// newline-delimited file.
struct HeuristicLexicon {
    std::vector<std::string> verbs;
    std::vector<std::string> auxiliaries;
    std::vector<std::string> determiners;
    std::vector<std::string> prepositions;
    std::vector<std::string> conjunctions;

    static HeuristicLexicon defaults();
    static HeuristicLexicon from_directory(const std::string& dir);
};

// Shallow rule-based parse: the first known verb roots the sentence,
// contiguous non-verb/non-preposition runs before it attach as subject
// groups and runs after it as object groups. Accuracy is best-effort; the
// output always satisfies the graph invariants. With no detectable verb the
// graph is rooted at the last token and flagged degraded.
DependencyGraph heuristic_parse(const std::vector<std::string>& tokens,
                                const HeuristicLexicon& lexicon = HeuristicLexicon::defaults());

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

class Provider {
public:
    virtual ~Provider() = default;
    // Parses one sentence. Throws on failure (callers degrade gracefully).
    virtual DependencyGraph parse(std::string_view sentence) = 0;
};

// Serves graphs from a parsed CoNLL-U file, keyed by the sentence's word
// sequence. Unknown sentences throw InputError.
std::unique_ptr<Provider> make_conllu_provider(std::string_view conllu_content);

// POSTs {"sentence": ...} to <endpoint>/parse and expects
// {"nodes":[{"index","form","lemma","upos","head","deprel"}]}.
std::unique_ptr<Provider> make_remote_provider(const std::string& endpoint, int timeout_seconds = 10,
                                               int retries = 2);

std::unique_ptr<Provider> make_heuristic_provider(HeuristicLexicon lexicon =
                                                      HeuristicLexicon::defaults());

// Splits a sentence into parser tokens: words plus standalone punctuation.
std::vector<std::string> parser_tokens(std::string_view sentence);

} // namespace docqa::dependency
