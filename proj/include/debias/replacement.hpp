#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "debias/corpus.hpp"
#include "debias/embeddings.hpp"
#include "debias/tagging.hpp"
#include "debias/wordnet.hpp"

namespace debias {

struct ReplacementStrategy {
    enum class Kind { PosTags, NeTags, Knn, WordNet, Centroid };

    Kind kind = Kind::PosTags;
    std::size_t knn_k = 5;
    std::uint64_t knn_seed = 0;
    int wordnet_level = 0;
    std::size_t centroid_k = 5;
};

const char* strategy_kind_name(ReplacementStrategy::Kind kind);
ReplacementStrategy::Kind parse_strategy_kind(const std::string& name);
// Human-readable form like "wordnet(level=2)" for reports.
std::string strategy_label(const ReplacementStrategy& strategy);

struct ReplacementResources {
    const PosTagger* pos_tagger = nullptr;
    const NeTagger* ne_tagger = nullptr;
    // Lexicon consulted when filtering Centroid neighbors by POS; neighbors
    // it does not know count as matching.
    const BuiltinPosTagger* lexicon = nullptr;
    const EmbeddingTable* embeddings = nullptr;
    const WordNetDb* wordnet = nullptr;
    const std::unordered_set<std::string>* vocab = nullptr;
};

struct ReplacementEvent {
    std::string doc_id;
    std::size_t position = 0;
    std::string original;
    std::string replacement;
};

struct UnchangedEvent {
    std::string doc_id;
    std::size_t position = 0;
    std::string word;
    std::string reason;
};

struct DebiasedCorpus {
    LabeledCorpus corpus;
    std::map<std::string, Vector> injected_vectors;
    std::vector<ReplacementEvent> log;
    std::vector<UnchangedEvent> unchanged;
};

// Uppercased word with anything outside [A-Z0-9_] mapped to '_', for use
// inside dummy tags.
std::string sanitize_tag_component(const std::string& word);

// Rewrites every occurrence of a bias-sensitive word according to the
// strategy. Tokens outside the two logs are untouched.
DebiasedCorpus apply_strategy(const LabeledCorpus& corpus,
                              const std::set<std::string>& bsw_words,
                              const ReplacementStrategy& strategy,
                              const ReplacementResources& resources);

void write_replacement_log(const DebiasedCorpus& result,
                           const std::string& path,
                           const std::string& config_hash);

struct MadlibsTemplate {
    Label label = Label::Neutral;
    std::string pattern;  // literal text with <slot> placeholders
};

struct MadlibsSpec {
    std::vector<MadlibsTemplate> templates;
    std::map<std::string, std::vector<std::string>> dictionaries;
    std::string bsw_slot = "identity";
    std::size_t target_size = 0;
    std::uint64_t seed = 0;
};

MadlibsSpec load_madlibs_spec(const std::string& path);

// Label-balanced (within one) template-instantiated corpus; documents whose
// template uses the bsw slot are annotated with the chosen filler.
LabeledCorpus generate_madlibs(const MadlibsSpec& spec);

// Appends target_size generated neutral documents to the corpus. All spec
// templates must be Neutral.
LabeledCorpus augment_with_templates(const LabeledCorpus& corpus,
                                     const MadlibsSpec& spec);

}  // namespace debias
