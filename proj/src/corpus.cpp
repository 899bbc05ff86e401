#include "debias/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "debias/det_rng.hpp"
#include "debias/errors.hpp"

namespace debias {

namespace {

// Bytes >= 0x80 are UTF-8 continuation/lead bytes; treat them as word
// characters so multibyte words are not clipped at the edges.
bool is_word_char(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

void strip_edges(std::string& tok) {
    std::size_t end = tok.size();
    while (end > 0 && !is_word_char(static_cast<unsigned char>(tok[end - 1]))) {
        --end;
    }
    std::size_t begin = 0;
    while (begin < end) {
        unsigned char c = static_cast<unsigned char>(tok[begin]);
        if (is_word_char(c) || c == '@' || c == '#') break;
        ++begin;
    }
    tok = tok.substr(begin, end - begin);
}

}  // namespace

std::vector<std::string> tokenize(const std::string& raw_text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&]() {
        if (current.empty()) return;
        strip_edges(current);
        if (!current.empty()) tokens.push_back(current);
        current.clear();
    };
    for (char ch : raw_text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            flush();
        } else {
            current.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    flush();
    return tokens;
}

namespace {

// RFC 4180 record reader: handles quoted fields with embedded delimiters,
// doubled quotes and newlines. TSV is a plain split, no quoting.
class DelimitedReader {
public:
    DelimitedReader(std::istream& in, char delim, bool quoted)
        : in_(in), delim_(delim), quoted_(quoted) {}

    bool next_record(std::vector<std::string>& fields) {
        fields.clear();
        if (!skip_comments_and_check()) return false;
        std::string field;
        bool in_quotes = false;
        bool saw_any = false;
        int ch;
        while ((ch = in_.get()) != EOF) {
            saw_any = true;
            char c = static_cast<char>(ch);
            if (in_quotes) {
                if (c == '"') {
                    if (in_.peek() == '"') {
                        in_.get();
                        field.push_back('"');
                    } else {
                        in_quotes = false;
                    }
                } else {
                    field.push_back(c);
                }
            } else if (quoted_ && c == '"' && field.empty()) {
                in_quotes = true;
            } else if (c == delim_) {
                fields.push_back(std::move(field));
                field.clear();
            } else if (c == '\n') {
                break;
            } else if (c == '\r') {
                // swallow; CRLF handled at '\n'
            } else {
                field.push_back(c);
            }
        }
        if (!saw_any) return false;
        fields.push_back(std::move(field));
        return true;
    }

private:
    bool skip_comments_and_check() {
        while (in_.peek() == '#') {
            std::string dummy;
            std::getline(in_, dummy);
        }
        return in_.peek() != EOF;
    }

    std::istream& in_;
    char delim_;
    bool quoted_;
};

std::string csv_escape(const std::string& s, char delim) {
    bool needs = s.find(delim) != std::string::npos ||
                 s.find('"') != std::string::npos ||
                 s.find('\n') != std::string::npos;
    if (!needs) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace

LabeledCorpus load_corpus(const std::string& path, CorpusFormat format,
                          const CorpusSchema& schema, const std::string& name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus file: " + path);

    char delim = format == CorpusFormat::Csv ? ',' : '\t';
    DelimitedReader reader(in, delim, format == CorpusFormat::Csv);

    std::vector<std::string> header;
    if (!reader.next_record(header)) {
        throw DataError("corpus file has no header row: " + path);
    }
    auto find_col = [&](const std::string& col) -> std::size_t {
        auto it = std::find(header.begin(), header.end(), col);
        if (it == header.end()) {
            throw DataError("schema error: column '" + col +
                            "' not found in header of " + path);
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    std::size_t text_idx = find_col(schema.text_column);
    std::size_t label_idx = find_col(schema.label_column);
    std::size_t ann_idx = 0;
    std::size_t min_fields = std::max(text_idx, label_idx);
    if (schema.annotation_column) {
        ann_idx = find_col(*schema.annotation_column);
        min_fields = std::max(min_fields, ann_idx);
    }

    LabeledCorpus corpus;
    corpus.name = name;
    std::vector<std::string> fields;
    std::size_t row = 0;
    while (reader.next_record(fields)) {
        if (fields.size() <= min_fields) {
            throw DataError("row " + std::to_string(row) + " of " + path +
                            " has only " + std::to_string(fields.size()) +
                            " fields");
        }
        const std::string& label_value = fields[label_idx];
        auto it = schema.label_map.find(label_value);
        if (it == schema.label_map.end()) {
            throw DataError("row " + std::to_string(row) +
                            ": unmappable label value '" + label_value + "'");
        }
        Document doc;
        doc.id = name + ":" + std::to_string(row);
        doc.raw_text = fields[text_idx];
        doc.tokens = tokenize(doc.raw_text);
        doc.label = it->second;
        if (schema.annotation_column && !fields[ann_idx].empty()) {
            corpus.annotations[doc.id] = fields[ann_idx];
        }
        corpus.documents.push_back(std::move(doc));
        ++row;
    }
    return corpus;
}

VocabularyStats build_vocabulary(const LabeledCorpus& corpus) {
    VocabularyStats vocab;
    for (const Document& doc : corpus.documents) {
        std::set<std::string> seen;
        for (const std::string& tok : doc.tokens) {
            vocab[tok].tf += 1;
            seen.insert(tok);
        }
        bool hateful = doc.label.has_value() && *doc.label == Label::Hateful;
        for (const std::string& tok : seen) {
            WordStats& ws = vocab[tok];
            ws.df += 1;
            if (hateful) ws.df_pos += 1;
            else ws.df_neg += 1;
        }
    }
    return vocab;
}

CorpusSplits split_corpus(const LabeledCorpus& corpus, SplitRatios ratios,
                          std::uint64_t seed) {
    double sum = ratios.train + ratios.dev + ratios.test;
    if (ratios.train < 0 || ratios.dev < 0 || ratios.test < 0 ||
        std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("split ratios must be non-negative and sum to 1");
    }
    std::size_t n = corpus.documents.size();
    std::size_t nonzero = (ratios.train > 0) + (ratios.dev > 0) + (ratios.test > 0);
    if (n < nonzero) {
        throw DataError("corpus of " + std::to_string(n) +
                        " documents cannot fill " + std::to_string(nonzero) +
                        " nonzero splits");
    }

    std::size_t n_dev = static_cast<std::size_t>(std::floor(n * ratios.dev));
    std::size_t n_test = static_cast<std::size_t>(std::floor(n * ratios.test));
    std::size_t n_train = n - n_dev - n_test;

    std::vector<std::size_t> order = shuffled_indices(n, seed);
    CorpusSplits splits;
    splits.train.name = corpus.name + "-train";
    splits.dev.name = corpus.name + "-dev";
    splits.test.name = corpus.name + "-test";
    for (std::size_t i = 0; i < n; ++i) {
        const Document& doc = corpus.documents[order[i]];
        LabeledCorpus& target = i < n_train ? splits.train
                                : i < n_train + n_dev ? splits.dev
                                                      : splits.test;
        target.documents.push_back(doc);
        auto ann = corpus.annotations.find(doc.id);
        if (ann != corpus.annotations.end()) {
            target.annotations.insert(*ann);
        }
    }
    return splits;
}

void write_corpus(const LabeledCorpus& corpus, const std::string& path,
                  CorpusFormat format, const std::string& meta_comment) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write corpus file: " + path);
    char delim = format == CorpusFormat::Csv ? ',' : '\t';
    bool annotated = !corpus.annotations.empty();
    if (!meta_comment.empty()) out << "# " << meta_comment << "\n";
    out << "text" << delim << "label";
    if (annotated) out << delim << "bsw";
    out << "\n";
    for (const Document& doc : corpus.documents) {
        // Rewritten documents are serialized from tokens so replacement tags
        // survive the round trip; untouched documents keep their raw text.
        std::string text = doc.raw_text;
        std::string joined;
        for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
            if (i) joined += ' ';
            joined += doc.tokens[i];
        }
        if (tokenize(doc.raw_text) != doc.tokens) text = joined;
        std::string label = doc.label ? label_name(*doc.label) : "";
        if (format == CorpusFormat::Csv) {
            out << csv_escape(text, delim) << delim << label;
        } else {
            out << text << delim << label;
        }
        if (annotated) {
            auto it = corpus.annotations.find(doc.id);
            out << delim << (it != corpus.annotations.end() ? it->second : "");
        }
        out << "\n";
    }
}

}  // namespace debias
