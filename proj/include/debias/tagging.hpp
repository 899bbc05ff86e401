#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace debias {

enum class PosTag { Noun, Verb, Adj, Adv, Pron, Det, Adp, Num, Conj, Prt, X };
enum class NeTag { Person, Date, Product, Organization, Location, Nationality, None };

const char* pos_tag_name(PosTag tag);
const char* ne_tag_name(NeTag tag);
PosTag parse_pos_tag(const std::string& name);
NeTag parse_ne_tag(const std::string& name);

class PosTagger {
public:
    virtual ~PosTagger() = default;
    virtual std::vector<PosTag> tag(const std::vector<std::string>& tokens,
                                    const std::string& doc_id) const = 0;
};

class NeTagger {
public:
    virtual ~NeTagger() = default;
    virtual std::vector<NeTag> tag(const std::vector<std::string>& tokens,
                                   const std::string& doc_id) const = 0;
};

// Function-word lexicon plus suffix rules; NOUN is the fallback.
class BuiltinPosTagger : public PosTagger {
public:
    BuiltinPosTagger();
    explicit BuiltinPosTagger(const std::string& lexicon_path);

    std::vector<PosTag> tag(const std::vector<std::string>& tokens,
                            const std::string& doc_id) const override;
    PosTag tag_word(const std::string& token) const;
    std::optional<PosTag> lexicon_tag(const std::string& word) const;

private:
    std::map<std::string, PosTag> lexicon_;
};

// Unigram gazetteer lookup; '@'-prefixed tokens map to PERSON.
class BuiltinNeTagger : public NeTagger {
public:
    BuiltinNeTagger() = default;
    explicit BuiltinNeTagger(const std::string& gazetteer_path);

    std::vector<NeTag> tag(const std::vector<std::string>& tokens,
                           const std::string& doc_id) const override;
    NeTag tag_word(const std::string& token) const;

private:
    std::map<std::string, NeTag> gazetteer_;
};

// Precomputed tags, one line per document: doc_id<TAB>tag tag tag...
class SidecarPosTagger : public PosTagger {
public:
    explicit SidecarPosTagger(const std::string& path);
    std::vector<PosTag> tag(const std::vector<std::string>& tokens,
                            const std::string& doc_id) const override;

private:
    std::map<std::string, std::vector<PosTag>> tags_;
};

class SidecarNeTagger : public NeTagger {
public:
    explicit SidecarNeTagger(const std::string& path);
    std::vector<NeTag> tag(const std::vector<std::string>& tokens,
                           const std::string& doc_id) const override;

private:
    std::map<std::string, std::vector<NeTag>> tags_;
};

}  // namespace debias
