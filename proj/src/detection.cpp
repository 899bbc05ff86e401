#include "debias/detection.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"

namespace debias {

const char* detection_strategy_name(DetectionStrategy s) {
    switch (s) {
        case DetectionStrategy::Manual: return "manual";
        case DetectionStrategy::Soac: return "soac";
        case DetectionStrategy::Spcpd: return "spcpd";
    }
    return "manual";
}

std::vector<BswCandidate> detect_soac(const VocabularyStats& vocab,
                                      const DetectionConfig& config) {
    std::vector<BswCandidate> out;
    for (const auto& [word, stats] : vocab) {
        if (stats.tf <= config.tf_cutoff) continue;
        if (stats.df_pos <= stats.df_neg) continue;
        if (config.abusive_words.count(word)) continue;
        BswCandidate c;
        c.word = word;
        c.strategy = DetectionStrategy::Soac;
        c.stats = stats;
        c.score = static_cast<double>(stats.df_pos) / static_cast<double>(stats.df);
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const BswCandidate& a, const BswCandidate& b) {
        if (a.stats->df != b.stats->df) return a.stats->df > b.stats->df;
        if (*a.score != *b.score) return *a.score > *b.score;
        return a.word < b.word;
    });
    if (out.size() > config.top_n) out.resize(config.top_n);
    return out;
}

std::vector<BswCandidate> detect_spcpd(ClassifierBackend& backend,
                                       const std::vector<std::string>& words,
                                       const DetectionConfig& config) {
    std::set<std::string> distinct(words.begin(), words.end());
    std::vector<BswCandidate> scored;
    for (const auto& word : distinct) {
        if (config.abusive_words.count(word)) continue;
        double p;
        try {
            p = backend.predict(word).p_hateful;
        } catch (const SpcpdInterrupted&) {
            throw;
        } catch (const TransportError& e) {
            throw SpcpdInterrupted(e, std::move(scored));
        }
        BswCandidate c;
        c.word = word;
        c.strategy = DetectionStrategy::Spcpd;
        c.score = p;
        scored.push_back(std::move(c));
    }
    std::vector<BswCandidate> out;
    for (auto& c : scored) {
        if (*c.score >= config.tau) out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const BswCandidate& a, const BswCandidate& b) {
        if (*a.score != *b.score) return *a.score > *b.score;
        return a.word < b.word;
    });
    if (out.size() > config.top_n) out.resize(config.top_n);
    return out;
}

double spcpd_from_distribution(const std::vector<double>& probs,
                               std::size_t catchall_idx) {
    if (probs.size() < 2) {
        throw std::invalid_argument("need at least two class probabilities");
    }
    if (catchall_idx >= probs.size()) {
        throw std::invalid_argument("catchall index out of range");
    }
    double best = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (i != catchall_idx) best = std::max(best, probs[i]);
    }
    return best;
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lowercase(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

}  // namespace

std::vector<BswCandidate> load_manual_list(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open word list: " + path);
    std::vector<BswCandidate> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string term = lowercase(trim(line));
        if (term.empty() || term[0] == '#') continue;
        BswCandidate c;
        c.word = term;
        c.strategy = DetectionStrategy::Manual;
        c.multiword = term.find(' ') != std::string::npos;
        out.push_back(std::move(c));
    }
    return out;
}

std::set<std::string> load_word_set(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open word list: " + path);
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string term = lowercase(trim(line));
        if (!term.empty() && term[0] != '#') out.insert(term);
    }
    return out;
}

void write_candidates_json(const std::vector<BswCandidate>& candidates,
                           const std::string& path,
                           const std::string& config_hash) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : candidates) {
        nlohmann::ordered_json j;
        j["word"] = c.word;
        if (c.score) j["score"] = *c.score;
        j["strategy"] = detection_strategy_name(c.strategy);
        if (c.multiword) j["multiword"] = true;
        if (c.stats) {
            j["stats"] = {{"tf", c.stats->tf},
                          {"df", c.stats->df},
                          {"df_pos", c.stats->df_pos},
                          {"df_neg", c.stats->df_neg}};
        }
        arr.push_back(std::move(j));
    }
    nlohmann::ordered_json doc;
    doc["config_hash"] = config_hash;
    doc["candidates"] = std::move(arr);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write candidate file: " + path);
    out << doc.dump(2) << '\n';
}

void write_candidates_text(const std::vector<BswCandidate>& candidates,
                           const std::string& path,
                           const std::string& config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write candidate file: " + path);
    out << "# config_hash=" << config_hash << '\n';
    for (const auto& c : candidates) out << c.word << '\n';
}

}  // namespace debias
