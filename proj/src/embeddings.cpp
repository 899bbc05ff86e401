#include "debias/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "debias/errors.hpp"

namespace debias {

double cosine(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("cosine: dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;  // OOV fallbacks produce zero vectors
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

bool is_dummy_tag(const std::string& token) {
    if (token.size() < 3 || token.front() != '<' || token.back() != '>') {
        return false;
    }
    for (std::size_t i = 1; i + 1 < token.size(); ++i) {
        char c = token[i];
        bool ok = (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

bool EmbeddingTable::contains(const std::string& word) const {
    return injected_.count(word) > 0 || entries_.count(word) > 0;
}

const Vector* EmbeddingTable::lookup(const std::string& word) const {
    auto it = injected_.find(word);
    if (it != injected_.end()) return &it->second;
    auto jt = entries_.find(word);
    if (jt != entries_.end()) return &jt->second;
    return nullptr;
}

void EmbeddingTable::add_entry(const std::string& word, Vector v) {
    if (dim_ == 0) dim_ = v.size();
    if (v.size() != dim_) {
        throw DataError("embedding for '" + word + "' has dimension " +
                        std::to_string(v.size()) + ", expected " +
                        std::to_string(dim_));
    }
    entries_[word] = std::move(v);
}

void EmbeddingTable::inject(const std::string& tag, Vector v) {
    if (!is_dummy_tag(tag)) {
        throw std::invalid_argument("invalid dummy tag syntax: " + tag);
    }
    if (entries_.count(tag)) {
        // Bracket syntax makes this unreachable for any tokenized input.
        throw std::invalid_argument("dummy tag collides with a real word: " + tag);
    }
    if (dim_ != 0 && v.size() != dim_) {
        throw std::invalid_argument("injected vector for " + tag +
                                    " has dimension " + std::to_string(v.size()) +
                                    ", expected " + std::to_string(dim_));
    }
    if (dim_ == 0) dim_ = v.size();
    injected_[tag] = std::move(v);
}

std::vector<std::pair<std::string, double>> EmbeddingTable::nearest_neighbors(
    const std::string& word, std::size_t k,
    const std::unordered_set<std::string>& exclude) const {
    auto it = entries_.find(word);
    if (it == entries_.end()) {
        throw DataError("word not in embedding table: " + word);
    }
    const Vector& query = it->second;

    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(entries_.size());
    for (const auto& [cand, vec] : entries_) {
        if (cand == word || exclude.count(cand)) continue;
        scored.emplace_back(cand, cosine(query, vec));
    }
    auto better = [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    };
    std::size_t take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                      better);
    scored.resize(take);
    return scored;
}

Vector EmbeddingTable::centroid(const std::vector<std::string>& words) const {
    if (words.empty()) {
        throw std::invalid_argument("centroid of empty word list");
    }
    Vector sum(dim_, 0.0);
    for (const std::string& w : words) {
        const Vector* v = lookup(w);
        if (!v) throw DataError("centroid: unresolvable word: " + w);
        for (std::size_t i = 0; i < dim_; ++i) sum[i] += (*v)[i];
    }
    for (double& c : sum) c /= static_cast<double>(words.size());
    return sum;
}

EmbeddingTable load_embeddings(const std::string& path,
                               std::optional<std::size_t> limit) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open embedding file: " + path);

    EmbeddingTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (limit && table.size() >= *limit) break;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        Vector v;
        double c;
        while (ls >> c) v.push_back(c);
        if (!ls.eof()) {
            throw DataError("non-numeric embedding component at line " +
                            std::to_string(line_no) + " of " + path);
        }
        if (v.empty()) {
            throw DataError("no components at line " + std::to_string(line_no) +
                            " of " + path);
        }
        if (table.dim() != 0 && v.size() != table.dim()) {
            throw DataError("inconsistent dimension at line " +
                            std::to_string(line_no) + " of " + path + ": got " +
                            std::to_string(v.size()) + ", expected " +
                            std::to_string(table.dim()));
        }
        table.add_entry(word, std::move(v));
    }
    return table;
}

}  // namespace debias
