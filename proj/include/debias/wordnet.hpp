#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace debias {

struct SynsetId {
    std::uint32_t offset = 0;
    char pos = 'n';

    auto operator<=>(const SynsetId&) const = default;
};

struct Synset {
    SynsetId id;
    std::vector<std::string> lemmas;     // lowercase, underscores inside
    std::vector<SynsetId> hypernyms;     // @ and @i pointers, stored order
};

class WordNetDb {
public:
    const Synset* find(SynsetId id) const;
    // Sense-ordered synset ids, or nullptr if the lemma is unknown.
    const std::vector<SynsetId>* senses(const std::string& lemma) const;
    const std::map<SynsetId, Synset>& synsets() const { return synsets_; }
    const std::map<std::string, std::vector<SynsetId>>& index() const {
        return index_;
    }
    std::size_t size() const { return synsets_.size(); }

    void add_synset(Synset s);
    void add_index_entry(const std::string& lemma, std::vector<SynsetId> ids);
    // Resolves index targets and hypernym pointers, rejects cycles.
    void validate() const;

private:
    std::map<SynsetId, Synset> synsets_;
    std::map<std::string, std::vector<SynsetId>> index_;
};

WordNetDb load_wordnet(const std::string& dir);

bool within_damerau_distance1(std::string_view a, std::string_view b);

// Lexicographically smallest lemma at Damerau-Levenshtein distance 1.
std::optional<std::string> spell_correct(const std::string& word,
                                         const WordNetDb& db);

// Ascends `level` hypernym steps from every sense of `word` (synsets without
// hypernyms stay put), then searches upward breadth-first for the first lemma
// other than `word` present in `vocab`.
std::optional<std::string> hypernym_generalize(
    const WordNetDb& db, const std::string& word, int level,
    const std::unordered_set<std::string>& vocab);

// Every vocab lemma other than `word` reachable from the level frontier,
// in discovery order.
std::vector<std::string> hypernym_candidates(
    const WordNetDb& db, const std::string& word, int level,
    const std::unordered_set<std::string>& vocab);

}  // namespace debias
