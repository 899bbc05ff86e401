#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace debias {

using Vector = std::vector<double>;

double cosine(const Vector& a, const Vector& b);

/// Word -> vector table parsed from a GloVe-style text file, plus a disjoint
/// key space of injected dummy-tag vectors (`<UPPERCASE_TAG>` tokens).
/// lookup() checks injected tags first.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return entries_.size(); }
    const std::unordered_map<std::string, Vector>& entries() const {
        return entries_;
    }
    const std::unordered_map<std::string, Vector>& injected() const {
        return injected_;
    }

    bool contains(const std::string& word) const;
    const Vector* lookup(const std::string& word) const;

    void add_entry(const std::string& word, Vector v);

    /// Register a dummy-tag vector. The tag must be `<[A-Z0-9_]+>`;
    /// re-injection overwrites.
    void inject(const std::string& tag, Vector v);

    /// Top-k entries by cosine similarity to `word`, excluding the word
    /// itself and `exclude`. Ties break lexicographically ascending.
    std::vector<std::pair<std::string, double>> nearest_neighbors(
        const std::string& word, std::size_t k,
        const std::unordered_set<std::string>& exclude = {}) const;

    /// Component-wise mean of the vectors for `words` (entries or injected).
    Vector centroid(const std::vector<std::string>& words) const;

private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, Vector> entries_;
    std::unordered_map<std::string, Vector> injected_;
};

/// Whether a token has valid dummy-tag syntax: `<[A-Z0-9_]+>`.
bool is_dummy_tag(const std::string& token);

EmbeddingTable load_embeddings(const std::string& path,
                               std::optional<std::size_t> limit = {});

}  // namespace debias
