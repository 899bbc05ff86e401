#include "debias/replacement.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "debias/det_rng.hpp"
#include "debias/errors.hpp"
#include "json.hpp"

namespace debias {

const char* strategy_kind_name(ReplacementStrategy::Kind kind) {
    switch (kind) {
        case ReplacementStrategy::Kind::PosTags: return "pos_tags";
        case ReplacementStrategy::Kind::NeTags: return "ne_tags";
        case ReplacementStrategy::Kind::Knn: return "knn";
        case ReplacementStrategy::Kind::WordNet: return "wordnet";
        case ReplacementStrategy::Kind::Centroid: return "centroid";
    }
    return "pos_tags";
}

ReplacementStrategy::Kind parse_strategy_kind(const std::string& name) {
    if (name == "pos_tags") return ReplacementStrategy::Kind::PosTags;
    if (name == "ne_tags") return ReplacementStrategy::Kind::NeTags;
    if (name == "knn") return ReplacementStrategy::Kind::Knn;
    if (name == "wordnet") return ReplacementStrategy::Kind::WordNet;
    if (name == "centroid") return ReplacementStrategy::Kind::Centroid;
    throw ConfigError("unknown replacement strategy: " + name);
}

std::string strategy_label(const ReplacementStrategy& strategy) {
    std::ostringstream out;
    out << strategy_kind_name(strategy.kind);
    switch (strategy.kind) {
        case ReplacementStrategy::Kind::Knn:
            out << "(k=" << strategy.knn_k << ")";
            break;
        case ReplacementStrategy::Kind::WordNet:
            out << "(level=" << strategy.wordnet_level << ")";
            break;
        case ReplacementStrategy::Kind::Centroid:
            out << "(k=" << strategy.centroid_k << ")";
            break;
        default:
            break;
    }
    return out.str();
}

std::string sanitize_tag_component(const std::string& word) {
    std::string out;
    out.reserve(word.size());
    for (char c : word) {
        if (c >= 'a' && c <= 'z') {
            out.push_back(static_cast<char>(c - 'a' + 'A'));
        } else if ((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_') {
            out.push_back(c);
        } else {
            out.push_back('_');
        }
    }
    return out;
}

namespace {

void validate_resources(const ReplacementStrategy& strategy,
                        const ReplacementResources& res) {
    using Kind = ReplacementStrategy::Kind;
    auto require = [](const void* p, const char* what) {
        if (!p) {
            throw ConfigError(std::string("replacement strategy requires ") + what);
        }
    };
    switch (strategy.kind) {
        case Kind::PosTags:
            require(res.pos_tagger, "a POS tagger");
            break;
        case Kind::NeTags:
            require(res.ne_tagger, "an NE tagger");
            break;
        case Kind::Knn:
            require(res.embeddings, "an embedding table");
            if (strategy.knn_k < 1) throw ConfigError("knn k must be >= 1");
            break;
        case Kind::WordNet:
            require(res.wordnet, "a wordnet database");
            require(res.vocab, "the training vocabulary");
            if (strategy.wordnet_level < 0 || strategy.wordnet_level > 5) {
                throw ConfigError("wordnet level must be in 0..5");
            }
            break;
        case Kind::Centroid:
            require(res.embeddings, "an embedding table");
            require(res.pos_tagger, "a POS tagger");
            break;
    }
}

// Neighbor pool for one word under the Knn strategy: the word itself first,
// then neighbors in similarity order.
std::vector<std::string> knn_pool(const EmbeddingTable& table,
                                  const std::string& word, std::size_t k) {
    std::vector<std::string> pool{word};
    for (auto& [neighbor, sim] : table.nearest_neighbors(word, k)) {
        pool.push_back(neighbor);
    }
    return pool;
}

struct CentroidEntry {
    std::string tag;
    Vector vector;
};

CentroidEntry make_centroid(const EmbeddingTable& table,
                            const BuiltinPosTagger* lexicon,
                            const std::string& word, PosTag occurrence_tag,
                            std::size_t k) {
    auto ranked = table.nearest_neighbors(word, table.size());
    std::vector<std::string> filtered;
    for (const auto& [cand, sim] : ranked) {
        auto tag = lexicon ? lexicon->lexicon_tag(cand) : std::nullopt;
        if (!tag || *tag == occurrence_tag) filtered.push_back(cand);
    }
    std::vector<std::string> chosen;
    if (filtered.size() >= k) {
        chosen.assign(filtered.begin(), filtered.begin() + k);
    } else {
        std::size_t take = std::min(k, ranked.size());
        for (std::size_t i = 0; i < take; ++i) chosen.push_back(ranked[i].first);
    }
    chosen.insert(chosen.begin(), word);

    CentroidEntry entry;
    entry.tag = "<CENTROID_" + sanitize_tag_component(word) + "_" +
                pos_tag_name(occurrence_tag) + ">";
    entry.vector = table.centroid(chosen);
    return entry;
}

}  // namespace

DebiasedCorpus apply_strategy(const LabeledCorpus& corpus,
                              const std::set<std::string>& bsw_words,
                              const ReplacementStrategy& strategy,
                              const ReplacementResources& res) {
    using Kind = ReplacementStrategy::Kind;
    validate_resources(strategy, res);

    DebiasedCorpus result;
    result.corpus = corpus;

    std::map<std::string, std::vector<std::string>> knn_pools;
    std::map<std::string, std::optional<std::string>> wordnet_cache;
    std::map<std::pair<std::string, PosTag>, CentroidEntry> centroid_cache;

    for (Document& doc : result.corpus.documents) {
        std::vector<PosTag> pos_tags;
        std::vector<NeTag> ne_tags;
        if (strategy.kind == Kind::PosTags || strategy.kind == Kind::Centroid) {
            pos_tags = res.pos_tagger->tag(doc.tokens, doc.id);
        } else if (strategy.kind == Kind::NeTags) {
            ne_tags = res.ne_tagger->tag(doc.tokens, doc.id);
        }

        for (std::size_t pos = 0; pos < doc.tokens.size(); ++pos) {
            const std::string word = doc.tokens[pos];
            if (!bsw_words.count(word)) continue;

            auto changed = [&](std::string replacement) {
                result.log.push_back({doc.id, pos, word, replacement});
                doc.tokens[pos] = std::move(replacement);
            };
            auto unchanged = [&](const char* reason) {
                result.unchanged.push_back({doc.id, pos, word, reason});
            };

            switch (strategy.kind) {
                case Kind::PosTags: {
                    changed("<POS_" + std::string(pos_tag_name(pos_tags[pos])) +
                            ">");
                    break;
                }
                case Kind::NeTags: {
                    if (ne_tags[pos] == NeTag::None) {
                        unchanged("not a named entity");
                    } else {
                        changed("<NE_" + std::string(ne_tag_name(ne_tags[pos])) +
                                ">");
                    }
                    break;
                }
                case Kind::Knn: {
                    if (!res.embeddings->contains(word)) {
                        unchanged("not in embeddings");
                        break;
                    }
                    auto pool_it = knn_pools.find(word);
                    if (pool_it == knn_pools.end()) {
                        pool_it = knn_pools
                                      .emplace(word, knn_pool(*res.embeddings,
                                                              word,
                                                              strategy.knn_k))
                                      .first;
                    }
                    const auto& pool = pool_it->second;
                    std::uint64_t raw = positional_draw(
                        strategy.knn_seed, fnv1a64(doc.id),
                        static_cast<std::uint64_t>(pos));
                    std::size_t idx = static_cast<std::size_t>(
                        draw_below(raw, pool.size()));
                    if (idx == 0) {
                        unchanged("self-draw");
                    } else {
                        changed(pool[idx]);
                    }
                    break;
                }
                case Kind::WordNet: {
                    auto cache_it = wordnet_cache.find(word);
                    if (cache_it == wordnet_cache.end()) {
                        cache_it = wordnet_cache
                                       .emplace(word, hypernym_generalize(
                                                          *res.wordnet, word,
                                                          strategy.wordnet_level,
                                                          *res.vocab))
                                       .first;
                    }
                    if (cache_it->second) {
                        changed(*cache_it->second);
                    } else {
                        unchanged("no hypernym in vocabulary");
                    }
                    break;
                }
                case Kind::Centroid: {
                    if (!res.embeddings->contains(word)) {
                        unchanged("not in embeddings");
                        break;
                    }
                    auto key = std::make_pair(word, pos_tags[pos]);
                    auto cache_it = centroid_cache.find(key);
                    if (cache_it == centroid_cache.end()) {
                        cache_it =
                            centroid_cache
                                .emplace(key, make_centroid(
                                                  *res.embeddings, res.lexicon,
                                                  word, pos_tags[pos],
                                                  strategy.centroid_k))
                                .first;
                    }
                    const CentroidEntry& entry = cache_it->second;
                    auto [slot, inserted] = result.injected_vectors.emplace(
                        entry.tag, entry.vector);
                    if (!inserted && slot->second != entry.vector) {
                        throw std::logic_error(
                            "conflicting vectors for injected tag " + entry.tag);
                    }
                    changed(entry.tag);
                    break;
                }
            }
        }
    }
    return result;
}

void write_replacement_log(const DebiasedCorpus& result,
                           const std::string& path,
                           const std::string& config_hash) {
    nlohmann::ordered_json j;
    j["config_hash"] = config_hash;
    auto changed = nlohmann::ordered_json::array();
    for (const auto& e : result.log) {
        changed.push_back({{"doc", e.doc_id},
                           {"position", e.position},
                           {"original", e.original},
                           {"replacement", e.replacement}});
    }
    auto kept = nlohmann::ordered_json::array();
    for (const auto& e : result.unchanged) {
        kept.push_back({{"doc", e.doc_id},
                        {"position", e.position},
                        {"word", e.word},
                        {"reason", e.reason}});
    }
    j["changed"] = std::move(changed);
    j["unchanged"] = std::move(kept);
    nlohmann::ordered_json injected = nlohmann::ordered_json::object();
    for (const auto& [tag, vec] : result.injected_vectors) injected[tag] = vec;
    j["injected_vectors"] = std::move(injected);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write replacement log: " + path);
    out << j.dump(2) << '\n';
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_slot_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_';
}

// Slot names referenced by a pattern, in order of first appearance.
std::vector<std::string> pattern_slots(const std::string& pattern) {
    std::vector<std::string> slots;
    std::size_t i = 0;
    while (i < pattern.size()) {
        if (pattern[i] != '<') {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < pattern.size() && is_slot_char(pattern[j])) ++j;
        if (j > i + 1 && j < pattern.size() && pattern[j] == '>') {
            slots.push_back(pattern.substr(i + 1, j - i - 1));
            i = j + 1;
        } else {
            ++i;
        }
    }
    return slots;
}

void validate_spec(const MadlibsSpec& spec) {
    for (const auto& tmpl : spec.templates) {
        for (const auto& slot : pattern_slots(tmpl.pattern)) {
            auto it = spec.dictionaries.find(slot);
            if (it == spec.dictionaries.end()) {
                throw ConfigError("madlibs slot '" + slot +
                                  "' is not defined by any dictionary");
            }
            if (it->second.empty()) {
                throw ConfigError("madlibs slot '" + slot +
                                  "' has an empty dictionary");
            }
        }
    }
}

struct GeneratedDoc {
    Document doc;
    std::optional<std::string> bsw;
};

// Fills one template deterministically: draw j for document i comes from
// the (i, j) position of the seed's stream.
GeneratedDoc instantiate(const MadlibsSpec& spec,
                         const std::vector<const MadlibsTemplate*>& pool,
                         const std::string& id_prefix, std::size_t index) {
    std::uint64_t key = fnv1a64(id_prefix) ^ static_cast<std::uint64_t>(index);
    std::uint64_t counter = 0;
    auto draw = [&](std::size_t n) {
        return static_cast<std::size_t>(
            draw_below(positional_draw(spec.seed, key, counter++), n));
    };

    const MadlibsTemplate& tmpl = *pool[draw(pool.size())];
    GeneratedDoc out;
    std::string text;
    const std::string& pattern = tmpl.pattern;
    std::size_t i = 0;
    while (i < pattern.size()) {
        if (pattern[i] != '<') {
            text.push_back(pattern[i++]);
            continue;
        }
        std::size_t j = i + 1;
        while (j < pattern.size() && is_slot_char(pattern[j])) ++j;
        if (j > i + 1 && j < pattern.size() && pattern[j] == '>') {
            std::string slot = pattern.substr(i + 1, j - i - 1);
            const auto& dict = spec.dictionaries.at(slot);
            const std::string& filler = dict[draw(dict.size())];
            text += filler;
            if (slot == spec.bsw_slot && !out.bsw) out.bsw = filler;
            i = j + 1;
        } else {
            text.push_back(pattern[i++]);
        }
    }
    out.doc.id = id_prefix + ":" + std::to_string(index);
    out.doc.raw_text = std::move(text);
    out.doc.tokens = tokenize(out.doc.raw_text);
    out.doc.label = tmpl.label;
    return out;
}

}  // namespace

MadlibsSpec load_madlibs_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open madlibs spec: " + path);

    MadlibsSpec spec;
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = t.substr(1, t.size() - 2);
            if (section != "templates" && section != "bsw_slot" &&
                section.rfind("dict:", 0) != 0) {
                throw ConfigError("madlibs spec " + path + ":" +
                                  std::to_string(line_no) +
                                  ": unknown section [" + section + "]");
            }
            continue;
        }
        if (section == "templates") {
            auto tab = line.find('\t');
            if (tab == std::string::npos) {
                throw ConfigError("madlibs spec " + path + ":" +
                                  std::to_string(line_no) +
                                  ": template line is not label<TAB>pattern");
            }
            std::string label = trim(line.substr(0, tab));
            MadlibsTemplate tmpl;
            if (label == "Hateful" || label == "hateful") {
                tmpl.label = Label::Hateful;
            } else if (label == "Neutral" || label == "neutral") {
                tmpl.label = Label::Neutral;
            } else {
                throw ConfigError("madlibs spec " + path + ":" +
                                  std::to_string(line_no) + ": unknown label '" +
                                  label + "'");
            }
            tmpl.pattern = trim(line.substr(tab + 1));
            spec.templates.push_back(std::move(tmpl));
        } else if (section == "bsw_slot") {
            spec.bsw_slot = t;
        } else if (section.rfind("dict:", 0) == 0) {
            spec.dictionaries[section.substr(5)].push_back(t);
        } else {
            throw ConfigError("madlibs spec " + path + ":" +
                              std::to_string(line_no) +
                              ": content before any section header");
        }
    }
    validate_spec(spec);
    return spec;
}

LabeledCorpus generate_madlibs(const MadlibsSpec& spec) {
    validate_spec(spec);
    std::vector<const MadlibsTemplate*> hateful, neutral;
    for (const auto& t : spec.templates) {
        (t.label == Label::Hateful ? hateful : neutral).push_back(&t);
    }
    if (spec.target_size > 0 && (hateful.empty() || neutral.empty())) {
        throw ConfigError("madlibs generation needs at least one template per label");
    }

    LabeledCorpus corpus;
    corpus.name = "madlibs";
    std::size_t n_hateful = spec.target_size / 2;
    std::size_t made_hateful = 0, made_neutral = 0;
    for (std::size_t i = 0; i < spec.target_size; ++i) {
        bool pick_hateful = made_hateful < n_hateful &&
                            (i % 2 == 0 || made_neutral >= spec.target_size - n_hateful);
        auto generated = instantiate(spec, pick_hateful ? hateful : neutral,
                                     "madlibs", i);
        (pick_hateful ? made_hateful : made_neutral) += 1;
        if (generated.bsw) corpus.annotations[generated.doc.id] = *generated.bsw;
        corpus.documents.push_back(std::move(generated.doc));
    }
    return corpus;
}

LabeledCorpus augment_with_templates(const LabeledCorpus& corpus,
                                     const MadlibsSpec& spec) {
    validate_spec(spec);
    std::vector<const MadlibsTemplate*> neutral;
    for (const auto& t : spec.templates) {
        if (t.label != Label::Neutral) {
            throw ConfigError("augmentation templates must all be Neutral");
        }
        neutral.push_back(&t);
    }
    if (spec.target_size > 0 && neutral.empty()) {
        throw ConfigError("augmentation needs at least one Neutral template");
    }

    LabeledCorpus out = corpus;
    for (std::size_t i = 0; i < spec.target_size; ++i) {
        out.documents.push_back(instantiate(spec, neutral, "aug", i).doc);
    }
    return out;
}

}  // namespace debias
