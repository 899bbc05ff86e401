#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "debias/classifier.hpp"
#include "debias/corpus.hpp"
#include "debias/errors.hpp"

namespace debias {

enum class DetectionStrategy { Manual, Soac, Spcpd };

const char* detection_strategy_name(DetectionStrategy s);

struct BswCandidate {
    std::string word;
    std::optional<double> score;
    DetectionStrategy strategy = DetectionStrategy::Manual;
    std::optional<WordStats> stats;
    bool multiword = false;
};

struct DetectionConfig {
    std::int64_t tf_cutoff = 10;
    double tau = 0.5;
    std::size_t top_n = 10;
    std::set<std::string> abusive_words;
};

// Raised when remote probing dies mid-list; `completed` holds the words
// scored before the failure.
class SpcpdInterrupted : public TransportError {
public:
    SpcpdInterrupted(const TransportError& cause,
                     std::vector<BswCandidate> completed)
        : TransportError(cause.what(), cause.failed_text),
          completed(std::move(completed)) {}

    std::vector<BswCandidate> completed;
};

// Keeps words with tf above the cutoff appearing more often in Hateful than
// Neutral documents, drops known abusive words, and ranks the rest by
// (df, df_pos/df) descending.
std::vector<BswCandidate> detect_soac(const VocabularyStats& vocab,
                                      const DetectionConfig& config);

// Scores each distinct word by the classifier's single-word Hateful
// probability and keeps those at or above tau.
std::vector<BswCandidate> detect_spcpd(ClassifierBackend& backend,
                                       const std::vector<std::string>& words,
                                       const DetectionConfig& config);

// Max class probability excluding the catchall class.
double spcpd_from_distribution(const std::vector<double>& probs,
                               std::size_t catchall_idx);

std::vector<BswCandidate> load_manual_list(const std::string& path);

std::set<std::string> load_word_set(const std::string& path);

void write_candidates_json(const std::vector<BswCandidate>& candidates,
                           const std::string& path,
                           const std::string& config_hash);
void write_candidates_text(const std::vector<BswCandidate>& candidates,
                           const std::string& path,
                           const std::string& config_hash);

}  // namespace debias
