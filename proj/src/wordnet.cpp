#include "debias/wordnet.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "debias/errors.hpp"

namespace debias {
namespace {

std::string format_offset(SynsetId id) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08u", id.offset);
    return buf;
}

std::string lowercase(std::string s) {
    for (char& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

// Adjective lemmas carry syntactic markers like "spread(p)"; strip them.
std::string clean_lemma(std::string s) {
    if (!s.empty() && s.back() == ')') {
        auto open = s.rfind('(');
        if (open != std::string::npos) s.erase(open);
    }
    return lowercase(std::move(s));
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& what) {
    throw DataError("parse error at " + path + ":" + std::to_string(line_no) +
                    ": " + what);
}

std::uint32_t parse_offset(const std::string& tok, const std::string& path,
                           std::size_t line_no) {
    if (tok.size() != 8 ||
        !std::all_of(tok.begin(), tok.end(),
                     [](unsigned char c) { return std::isdigit(c); })) {
        parse_fail(path, line_no, "bad synset offset '" + tok + "'");
    }
    return static_cast<std::uint32_t>(std::stoul(tok));
}

long parse_number(const std::string& tok, int base, const std::string& path,
                  std::size_t line_no, const char* what) {
    std::size_t used = 0;
    long value = 0;
    try {
        value = std::stol(tok, &used, base);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != tok.size() || value < 0) {
        parse_fail(path, line_no,
                   std::string("bad ") + what + " '" + tok + "'");
    }
    return value;
}

void load_data_file(const std::string& path, WordNetDb& db) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open wordnet data file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || std::isspace(static_cast<unsigned char>(line[0]))) {
            continue;  // license header lines start with whitespace
        }
        std::istringstream ls(line);
        std::string tok;
        auto next = [&](const char* what) {
            if (!(ls >> tok)) parse_fail(path, line_no, std::string("truncated record, expected ") + what);
            return tok;
        };

        Synset synset;
        synset.id.offset = parse_offset(next("synset offset"), path, line_no);
        next("lex filenum");
        std::string ss_type = next("synset type");
        if (ss_type.size() != 1) parse_fail(path, line_no, "bad synset type '" + ss_type + "'");
        synset.id.pos = ss_type[0] == 's' ? 'a' : ss_type[0];

        long w_cnt = parse_number(next("word count"), 16, path, line_no, "word count");
        if (w_cnt < 1) parse_fail(path, line_no, "word count must be positive");
        for (long i = 0; i < w_cnt; ++i) {
            synset.lemmas.push_back(clean_lemma(next("lemma")));
            next("lex id");
        }

        long p_cnt = parse_number(next("pointer count"), 10, path, line_no, "pointer count");
        for (long i = 0; i < p_cnt; ++i) {
            std::string symbol = next("pointer symbol");
            std::uint32_t target = parse_offset(next("pointer offset"), path, line_no);
            std::string pos = next("pointer pos");
            if (pos.size() != 1) parse_fail(path, line_no, "bad pointer pos '" + pos + "'");
            next("pointer source/target");
            if ((symbol == "@" || symbol == "@i") && pos[0] == 'n') {
                synset.hypernyms.push_back(SynsetId{target, 'n'});
            }
        }
        db.add_synset(std::move(synset));
    }
}

void load_index_file(const std::string& path, WordNetDb& db) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open wordnet index file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || std::isspace(static_cast<unsigned char>(line[0]))) {
            continue;
        }
        std::istringstream ls(line);
        std::string tok;
        auto next = [&](const char* what) {
            if (!(ls >> tok)) parse_fail(path, line_no, std::string("truncated record, expected ") + what);
            return tok;
        };

        std::string lemma = lowercase(next("lemma"));
        std::string pos = next("pos");
        if (pos.size() != 1) parse_fail(path, line_no, "bad pos '" + pos + "'");
        long synset_cnt = parse_number(next("synset count"), 10, path, line_no, "synset count");
        long p_cnt = parse_number(next("pointer count"), 10, path, line_no, "pointer count");
        for (long i = 0; i < p_cnt; ++i) next("pointer symbol");
        next("sense count");
        next("tagsense count");
        std::vector<SynsetId> ids;
        for (long i = 0; i < synset_cnt; ++i) {
            ids.push_back(SynsetId{parse_offset(next("synset offset"), path, line_no), pos[0]});
        }
        db.add_index_entry(lemma, std::move(ids));
    }
}

}  // namespace

const Synset* WordNetDb::find(SynsetId id) const {
    auto it = synsets_.find(id);
    return it == synsets_.end() ? nullptr : &it->second;
}

const std::vector<SynsetId>* WordNetDb::senses(const std::string& lemma) const {
    auto it = index_.find(lemma);
    return it == index_.end() ? nullptr : &it->second;
}

void WordNetDb::add_synset(Synset s) {
    SynsetId id = s.id;
    synsets_[id] = std::move(s);
}

void WordNetDb::add_index_entry(const std::string& lemma,
                                std::vector<SynsetId> ids) {
    index_[lemma] = std::move(ids);
}

void WordNetDb::validate() const {
    for (const auto& [lemma, ids] : index_) {
        for (SynsetId id : ids) {
            if (!synsets_.count(id)) {
                throw DataError("wordnet integrity error: index entry '" + lemma +
                                "' references missing synset " + format_offset(id));
            }
        }
    }
    for (const auto& [id, synset] : synsets_) {
        for (SynsetId h : synset.hypernyms) {
            if (!synsets_.count(h)) {
                throw DataError("wordnet integrity error: synset " +
                                format_offset(id) + " has dangling hypernym " +
                                format_offset(h));
            }
        }
    }

    // Iterative 3-color DFS over hypernym edges; a back edge is a cycle.
    enum class Color { White, Gray, Black };
    std::map<SynsetId, Color> color;
    for (const auto& [id, synset] : synsets_) color[id] = Color::White;
    for (const auto& [start, synset] : synsets_) {
        if (color[start] != Color::White) continue;
        std::vector<std::pair<SynsetId, std::size_t>> stack{{start, 0}};
        color[start] = Color::Gray;
        while (!stack.empty()) {
            auto& [id, edge] = stack.back();
            const Synset& s = synsets_.at(id);
            if (edge < s.hypernyms.size()) {
                SynsetId h = s.hypernyms[edge++];
                if (color[h] == Color::Gray) {
                    std::string cycle = format_offset(h);
                    for (auto it = stack.begin(); it != stack.end(); ++it) {
                        if (it->first == h) {
                            cycle.clear();
                            for (; it != stack.end(); ++it) {
                                cycle += format_offset(it->first) + " -> ";
                            }
                            cycle += format_offset(h);
                            break;
                        }
                    }
                    throw DataError("wordnet integrity error: hypernym cycle " + cycle);
                }
                if (color[h] == Color::White) {
                    color[h] = Color::Gray;
                    stack.emplace_back(h, 0);
                }
            } else {
                color[id] = Color::Black;
                stack.pop_back();
            }
        }
    }
}

WordNetDb load_wordnet(const std::string& dir) {
    WordNetDb db;
    load_data_file(dir + "/data.noun", db);
    load_index_file(dir + "/index.noun", db);
    db.validate();
    return db;
}

bool within_damerau_distance1(std::string_view a, std::string_view b) {
    if (a == b) return false;
    if (a.size() > b.size()) std::swap(a, b);
    std::size_t la = a.size(), lb = b.size();
    if (lb - la > 1) return false;
    std::size_t i = 0;
    while (i < la && a[i] == b[i]) ++i;
    if (la == lb) {
        // One substitution, or one transposition of adjacent characters.
        bool substitution = true;
        for (std::size_t k = i + 1; k < la; ++k) {
            if (a[k] != b[k]) {
                substitution = false;
                break;
            }
        }
        if (substitution) return true;
        if (i + 1 >= la || a[i] != b[i + 1] || a[i + 1] != b[i]) return false;
        for (std::size_t k = i + 2; k < la; ++k) {
            if (a[k] != b[k]) return false;
        }
        return true;
    }
    // One insertion into the shorter string.
    for (std::size_t k = i; k < la; ++k) {
        if (a[k] != b[k + 1]) return false;
    }
    return true;
}

std::optional<std::string> spell_correct(const std::string& word,
                                         const WordNetDb& db) {
    for (const auto& [lemma, ids] : db.index()) {
        if (lemma.size() + 1 < word.size() || lemma.size() > word.size() + 1) {
            continue;
        }
        if (within_damerau_distance1(word, lemma)) return lemma;
    }
    return std::nullopt;
}

namespace {

std::vector<SynsetId> resolve_senses(const WordNetDb& db,
                                     const std::string& word) {
    if (const auto* ids = db.senses(word)) return *ids;
    if (auto corrected = spell_correct(word, db)) {
        if (const auto* ids = db.senses(*corrected)) return *ids;
    }
    return {};
}

std::vector<SynsetId> ascend_frontier(const WordNetDb& db,
                                      std::vector<SynsetId> frontier,
                                      int level) {
    for (int step = 0; step < level; ++step) {
        std::vector<SynsetId> next;
        std::set<SynsetId> seen;
        for (SynsetId id : frontier) {
            const Synset* s = db.find(id);
            if (!s) continue;
            if (s->hypernyms.empty()) {
                if (seen.insert(id).second) next.push_back(id);
                continue;
            }
            for (SynsetId h : s->hypernyms) {
                if (seen.insert(h).second) next.push_back(h);
            }
        }
        frontier = std::move(next);
    }
    return frontier;
}

template <typename Visit>
void search_upward(const WordNetDb& db, const std::vector<SynsetId>& frontier,
                   Visit visit) {
    std::deque<SynsetId> queue(frontier.begin(), frontier.end());
    std::set<SynsetId> visited(frontier.begin(), frontier.end());
    while (!queue.empty()) {
        SynsetId id = queue.front();
        queue.pop_front();
        const Synset* s = db.find(id);
        if (!s) continue;
        if (!visit(*s)) return;
        for (SynsetId h : s->hypernyms) {
            if (visited.insert(h).second) queue.push_back(h);
        }
    }
}

}  // namespace

std::optional<std::string> hypernym_generalize(
    const WordNetDb& db, const std::string& word, int level,
    const std::unordered_set<std::string>& vocab) {
    if (level < 0) throw std::invalid_argument("hypernym level must be >= 0");
    auto frontier = ascend_frontier(db, resolve_senses(db, word), level);
    std::optional<std::string> result;
    search_upward(db, frontier, [&](const Synset& s) {
        for (const auto& lemma : s.lemmas) {
            if (lemma != word && vocab.count(lemma)) {
                result = lemma;
                return false;
            }
        }
        return true;
    });
    return result;
}

std::vector<std::string> hypernym_candidates(
    const WordNetDb& db, const std::string& word, int level,
    const std::unordered_set<std::string>& vocab) {
    if (level < 0) throw std::invalid_argument("hypernym level must be >= 0");
    auto frontier = ascend_frontier(db, resolve_senses(db, word), level);
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    search_upward(db, frontier, [&](const Synset& s) {
        for (const auto& lemma : s.lemmas) {
            if (lemma != word && vocab.count(lemma) && seen.insert(lemma).second) {
                out.push_back(lemma);
            }
        }
        return true;
    });
    return out;
}

}  // namespace debias
