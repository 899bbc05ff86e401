#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace debias {

/// Binary label. Class index 0 = Neutral, 1 = Hateful, fixed.
enum class Label : int { Neutral = 0, Hateful = 1 };

inline const char* label_name(Label l) {
    return l == Label::Hateful ? "Hateful" : "Neutral";
}

struct Document {
    std::string id;
    std::string raw_text;
    std::vector<std::string> tokens;  // tokenize(raw_text), possibly rewritten
    std::optional<Label> label;       // absent for unlabeled probe inputs
};

struct LabeledCorpus {
    std::string name;
    std::vector<Document> documents;
    // Optional per-document marker word (doc id -> bias-sensitive word the
    // document was generated around); drives subgroup AUC evaluation.
    std::map<std::string, std::string> annotations;
};

struct WordStats {
    std::int64_t tf = 0;      // total occurrences
    std::int64_t df = 0;      // documents containing the word
    std::int64_t df_pos = 0;  // Hateful documents containing the word
    std::int64_t df_neg = 0;  // Neutral documents containing the word
};

// std::map so iteration over words is lexicographic and deterministic.
using VocabularyStats = std::map<std::string, WordStats>;

/// Lowercase, split on whitespace, strip leading/trailing non-alphanumeric
/// characters from each token. A leading '@' or '#' is kept (tweet mentions
/// and hashtags carry bias signal). Empty tokens are dropped.
std::vector<std::string> tokenize(const std::string& raw_text);

enum class CorpusFormat { Csv, Tsv };

/// Column schema plus the per-dataset label value map. Several raw values may
/// map to the same Label (e.g. collapsing hateful+offensive to Hateful).
struct CorpusSchema {
    std::string text_column;
    std::string label_column;
    std::map<std::string, Label> label_map;
    // When set, the named column is read into LabeledCorpus::annotations
    // (empty cells are skipped).
    std::optional<std::string> annotation_column;
};

/// Load a delimited file with a header row. CSV fields follow RFC 4180
/// quoting; TSV is a plain tab split. Lines starting with '#' before the
/// header are metadata comments and are skipped. Document ids are
/// "<name>:<row-index>" with 0-based data-row indices.
LabeledCorpus load_corpus(const std::string& path, CorpusFormat format,
                          const CorpusSchema& schema, const std::string& name);

VocabularyStats build_vocabulary(const LabeledCorpus& corpus);

struct SplitRatios {
    double train = 0.8;
    double dev = 0.1;
    double test = 0.1;
};

struct CorpusSplits {
    LabeledCorpus train;
    LabeledCorpus dev;
    LabeledCorpus test;
};

/// Deterministic seeded shuffle, then floor-based partition sizes for dev and
/// test with the remainder assigned to train.
CorpusSplits split_corpus(const LabeledCorpus& corpus, SplitRatios ratios,
                          std::uint64_t seed);

/// Write a corpus back out in the given format with columns text,label
/// (plus a bsw annotation column when the corpus carries annotations).
/// Leading '#' comment lines carry metadata such as the config hash.
void write_corpus(const LabeledCorpus& corpus, const std::string& path,
                  CorpusFormat format, const std::string& meta_comment = "");

}  // namespace debias
