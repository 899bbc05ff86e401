#include "debias/tagging.hpp"

#include <fstream>
#include <sstream>

#include "debias/errors.hpp"

namespace debias {
namespace {

const std::pair<const char*, PosTag> kPosNames[] = {
    {"NOUN", PosTag::Noun}, {"VERB", PosTag::Verb}, {"ADJ", PosTag::Adj},
    {"ADV", PosTag::Adv},   {"PRON", PosTag::Pron}, {"DET", PosTag::Det},
    {"ADP", PosTag::Adp},   {"NUM", PosTag::Num},   {"CONJ", PosTag::Conj},
    {"PRT", PosTag::Prt},   {"X", PosTag::X},
};

const std::pair<const char*, NeTag> kNeNames[] = {
    {"PERSON", NeTag::Person},
    {"DATE", NeTag::Date},
    {"PRODUCT", NeTag::Product},
    {"ORGANIZATION", NeTag::Organization},
    {"LOCATION", NeTag::Location},
    {"NATIONALITY", NeTag::Nationality},
    {"NONE", NeTag::None},
};

struct FunctionWord {
    const char* word;
    PosTag tag;
};

const FunctionWord kFunctionWords[] = {
    {"i", PosTag::Pron},       {"you", PosTag::Pron},
    {"he", PosTag::Pron},      {"she", PosTag::Pron},
    {"it", PosTag::Pron},      {"we", PosTag::Pron},
    {"they", PosTag::Pron},    {"me", PosTag::Pron},
    {"him", PosTag::Pron},     {"her", PosTag::Pron},
    {"us", PosTag::Pron},      {"them", PosTag::Pron},
    {"my", PosTag::Pron},      {"your", PosTag::Pron},
    {"his", PosTag::Pron},     {"its", PosTag::Pron},
    {"our", PosTag::Pron},     {"their", PosTag::Pron},
    {"who", PosTag::Pron},     {"whom", PosTag::Pron},
    {"what", PosTag::Pron},    {"which", PosTag::Pron},
    {"someone", PosTag::Pron}, {"anyone", PosTag::Pron},
    {"everyone", PosTag::Pron},
    {"a", PosTag::Det},        {"an", PosTag::Det},
    {"the", PosTag::Det},      {"this", PosTag::Det},
    {"that", PosTag::Det},     {"these", PosTag::Det},
    {"those", PosTag::Det},    {"each", PosTag::Det},
    {"every", PosTag::Det},    {"some", PosTag::Det},
    {"any", PosTag::Det},      {"no", PosTag::Det},
    {"all", PosTag::Det},      {"both", PosTag::Det},
    {"in", PosTag::Adp},       {"on", PosTag::Adp},
    {"at", PosTag::Adp},       {"of", PosTag::Adp},
    {"to", PosTag::Adp},       {"for", PosTag::Adp},
    {"with", PosTag::Adp},     {"from", PosTag::Adp},
    {"by", PosTag::Adp},       {"about", PosTag::Adp},
    {"into", PosTag::Adp},     {"over", PosTag::Adp},
    {"under", PosTag::Adp},    {"after", PosTag::Adp},
    {"before", PosTag::Adp},   {"between", PosTag::Adp},
    {"against", PosTag::Adp},  {"during", PosTag::Adp},
    {"without", PosTag::Adp},  {"like", PosTag::Adp},
    {"as", PosTag::Adp},
    {"and", PosTag::Conj},     {"or", PosTag::Conj},
    {"but", PosTag::Conj},     {"nor", PosTag::Conj},
    {"so", PosTag::Conj},      {"yet", PosTag::Conj},
    {"if", PosTag::Conj},      {"because", PosTag::Conj},
    {"while", PosTag::Conj},   {"although", PosTag::Conj},
    {"though", PosTag::Conj},  {"unless", PosTag::Conj},
    {"be", PosTag::Verb},      {"am", PosTag::Verb},
    {"is", PosTag::Verb},      {"are", PosTag::Verb},
    {"was", PosTag::Verb},     {"were", PosTag::Verb},
    {"been", PosTag::Verb},    {"being", PosTag::Verb},
    {"have", PosTag::Verb},    {"has", PosTag::Verb},
    {"had", PosTag::Verb},     {"do", PosTag::Verb},
    {"does", PosTag::Verb},    {"did", PosTag::Verb},
    {"done", PosTag::Verb},    {"will", PosTag::Verb},
    {"would", PosTag::Verb},   {"can", PosTag::Verb},
    {"could", PosTag::Verb},   {"shall", PosTag::Verb},
    {"should", PosTag::Verb},  {"may", PosTag::Verb},
    {"might", PosTag::Verb},   {"must", PosTag::Verb},
    {"go", PosTag::Verb},      {"get", PosTag::Verb},
    {"make", PosTag::Verb},    {"say", PosTag::Verb},
    {"know", PosTag::Verb},    {"think", PosTag::Verb},
    {"see", PosTag::Verb},     {"want", PosTag::Verb},
    {"not", PosTag::Prt},      {"nt", PosTag::Prt},
    {"up", PosTag::Prt},       {"out", PosTag::Prt},
    {"off", PosTag::Prt},      {"down", PosTag::Prt},
    {"very", PosTag::Adv},     {"too", PosTag::Adv},
    {"also", PosTag::Adv},     {"just", PosTag::Adv},
    {"now", PosTag::Adv},      {"then", PosTag::Adv},
    {"here", PosTag::Adv},     {"there", PosTag::Adv},
    {"when", PosTag::Adv},     {"where", PosTag::Adv},
    {"why", PosTag::Adv},      {"how", PosTag::Adv},
    {"again", PosTag::Adv},    {"never", PosTag::Adv},
    {"always", PosTag::Adv},   {"often", PosTag::Adv},
    {"still", PosTag::Adv},    {"well", PosTag::Adv},
    {"more", PosTag::Adv},     {"most", PosTag::Adv},
    {"less", PosTag::Adv},     {"least", PosTag::Adv},
    {"good", PosTag::Adj},     {"bad", PosTag::Adj},
    {"new", PosTag::Adj},      {"old", PosTag::Adj},
    {"great", PosTag::Adj},    {"big", PosTag::Adj},
    {"small", PosTag::Adj},    {"same", PosTag::Adj},
    {"other", PosTag::Adj},    {"such", PosTag::Adj},
};

bool ends_with(const std::string& s, const char* suffix) {
    std::string_view sv(suffix);
    return s.size() > sv.size() &&
           s.compare(s.size() - sv.size(), sv.size(), sv) == 0;
}

bool is_numeric_token(const std::string& s) {
    bool digit_seen = false;
    for (char c : s) {
        if (c >= '0' && c <= '9') {
            digit_seen = true;
        } else if (c != '.' && c != ',') {
            return false;
        }
    }
    return digit_seen;
}

template <typename Tag>
std::map<std::string, std::vector<Tag>> load_sidecar(
    const std::string& path, Tag (*parse)(const std::string&)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open sidecar file: " + path);
    std::map<std::string, std::vector<Tag>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError("sidecar line " + std::to_string(line_no) + " of " +
                            path + " has no tab-separated document id");
        }
        std::string doc_id = line.substr(0, tab);
        std::istringstream rest(line.substr(tab + 1));
        std::vector<Tag> tags;
        std::string name;
        while (rest >> name) tags.push_back(parse(name));
        out[doc_id] = std::move(tags);
    }
    return out;
}

template <typename Tag>
std::vector<Tag> sidecar_lookup(const std::map<std::string, std::vector<Tag>>& tags,
                                const std::vector<std::string>& tokens,
                                const std::string& doc_id) {
    auto it = tags.find(doc_id);
    if (it == tags.end()) {
        throw DataError("no sidecar tags for document " + doc_id);
    }
    if (it->second.size() != tokens.size()) {
        throw DataError("sidecar tag count mismatch for document " + doc_id +
                        ": " + std::to_string(it->second.size()) + " tags for " +
                        std::to_string(tokens.size()) + " tokens");
    }
    return it->second;
}

}  // namespace

const char* pos_tag_name(PosTag tag) {
    for (const auto& [name, t] : kPosNames) {
        if (t == tag) return name;
    }
    return "X";
}

const char* ne_tag_name(NeTag tag) {
    for (const auto& [name, t] : kNeNames) {
        if (t == tag) return name;
    }
    return "NONE";
}

PosTag parse_pos_tag(const std::string& name) {
    for (const auto& [n, t] : kPosNames) {
        if (name == n) return t;
    }
    throw DataError("unknown POS tag: " + name);
}

NeTag parse_ne_tag(const std::string& name) {
    for (const auto& [n, t] : kNeNames) {
        if (name == n) return t;
    }
    throw DataError("unknown NE tag: " + name);
}

BuiltinPosTagger::BuiltinPosTagger() {
    for (const auto& fw : kFunctionWords) lexicon_[fw.word] = fw.tag;
}

BuiltinPosTagger::BuiltinPosTagger(const std::string& lexicon_path)
    : BuiltinPosTagger() {
    std::ifstream in(lexicon_path, std::ios::binary);
    if (!in) throw DataError("cannot open lexicon file: " + lexicon_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError("lexicon line " + std::to_string(line_no) + " of " +
                            lexicon_path + " is not word<TAB>POS");
        }
        lexicon_[line.substr(0, tab)] = parse_pos_tag(line.substr(tab + 1));
    }
}

std::optional<PosTag> BuiltinPosTagger::lexicon_tag(const std::string& word) const {
    auto it = lexicon_.find(word);
    if (it == lexicon_.end()) return std::nullopt;
    return it->second;
}

PosTag BuiltinPosTagger::tag_word(const std::string& token) const {
    auto it = lexicon_.find(token);
    if (it != lexicon_.end()) return it->second;
    if (!token.empty() && token[0] == '@') return PosTag::Noun;
    if (is_numeric_token(token)) return PosTag::Num;
    if (ends_with(token, "ing") || ends_with(token, "ed")) return PosTag::Verb;
    if (ends_with(token, "ly")) return PosTag::Adv;
    if (ends_with(token, "ous") || ends_with(token, "ful") ||
        ends_with(token, "ish")) {
        return PosTag::Adj;
    }
    return PosTag::Noun;
}

std::vector<PosTag> BuiltinPosTagger::tag(const std::vector<std::string>& tokens,
                                          const std::string&) const {
    std::vector<PosTag> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(tag_word(t));
    return out;
}

BuiltinNeTagger::BuiltinNeTagger(const std::string& gazetteer_path) {
    std::ifstream in(gazetteer_path, std::ios::binary);
    if (!in) throw DataError("cannot open gazetteer file: " + gazetteer_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError("gazetteer line " + std::to_string(line_no) + " of " +
                            gazetteer_path + " is not word<TAB>NETAG");
        }
        gazetteer_[line.substr(0, tab)] = parse_ne_tag(line.substr(tab + 1));
    }
}

NeTag BuiltinNeTagger::tag_word(const std::string& token) const {
    auto it = gazetteer_.find(token);
    if (it != gazetteer_.end()) return it->second;
    if (!token.empty() && token[0] == '@') return NeTag::Person;
    return NeTag::None;
}

std::vector<NeTag> BuiltinNeTagger::tag(const std::vector<std::string>& tokens,
                                        const std::string&) const {
    std::vector<NeTag> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(tag_word(t));
    return out;
}

SidecarPosTagger::SidecarPosTagger(const std::string& path)
    : tags_(load_sidecar<PosTag>(path, parse_pos_tag)) {}

std::vector<PosTag> SidecarPosTagger::tag(const std::vector<std::string>& tokens,
                                          const std::string& doc_id) const {
    return sidecar_lookup(tags_, tokens, doc_id);
}

SidecarNeTagger::SidecarNeTagger(const std::string& path)
    : tags_(load_sidecar<NeTag>(path, parse_ne_tag)) {}

std::vector<NeTag> SidecarNeTagger::tag(const std::vector<std::string>& tokens,
                                        const std::string& doc_id) const {
    return sidecar_lookup(tags_, tokens, doc_id);
}

}  // namespace debias
