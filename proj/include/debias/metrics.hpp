#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "debias/classifier.hpp"
#include "debias/corpus.hpp"
#include "debias/errors.hpp"

namespace debias {

// Rank-based (Mann-Whitney) area under the ROC curve with average ranks
// for tied scores.
double roc_auc(const std::vector<double>& scores,
               const std::vector<Label>& labels);

enum class PinnedVariant { Mean, Sym, Asym };

const char* pinned_variant_name(PinnedVariant v);

// Mean absolute deviation of single-word Hateful probabilities from the
// pinned value: Mean pins to the average probe, Sym to 0.5, Asym per word
// to min(p, 0.5) so only above-0.5 probes are penalized.
double pb_from_probes(const std::map<std::string, double>& probes,
                      PinnedVariant variant);

struct PbResult {
    double value = 0.0;
    std::map<std::string, double> probes;
};

class PbInterrupted : public TransportError {
public:
    PbInterrupted(const TransportError& cause,
                  std::map<std::string, double> probes)
        : TransportError(cause.what(), cause.failed_text),
          probes(std::move(probes)) {}

    std::map<std::string, double> probes;
};

PbResult pb(ClassifierBackend& backend, const std::set<std::string>& words,
            PinnedVariant variant);

std::map<std::string, double> probe_words(ClassifierBackend& backend,
                                          const std::set<std::string>& words);

struct PaucResult {
    double value = 0.0;
    double overall_auc = 0.0;
    std::map<std::string, double> per_word_auc;
    std::vector<std::string> skipped;  // words with no annotated documents
    std::vector<std::string> capped;   // words with a short control sample
};

// Sums |AUC - AUC(w)| over annotated subgroups. Each subgroup is the word's
// documents plus an equal-size seeded sample of documents not annotated with
// it; the overall AUC pools every subgroup (duplicates kept).
PaucResult pauc_from_scores(
    const std::vector<double>& scores, const std::vector<Label>& labels,
    const std::vector<std::optional<std::string>>& annotation,
    const std::set<std::string>& bsw_words, std::uint64_t seed);

PaucResult pauc(ClassifierBackend& backend, const LabeledCorpus& corpus,
                const std::set<std::string>& bsw_words, std::uint64_t seed);

struct EvalReport {
    std::string dataset;
    std::string detection;
    std::string replacement;
    int run_count = 1;
    double roc_auc = 0.0;
    double pb_mean = 0.0;
    double pb_sym = 0.0;
    double pb_asym = 0.0;
    std::optional<double> pauc;
    std::map<std::string, double> per_word;
    std::vector<std::string> skipped_bsws;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string timestamp;
};

// Means of every metric across runs; per-word probes averaged, skipped
// lists unioned. Identity metadata is taken from the first report.
EvalReport aggregate_reports(const std::vector<EvalReport>& runs);

std::string report_to_json(const EvalReport& report);
void write_report(const EvalReport& report, const std::string& path);

// UTC ISO-8601 from SOURCE_DATE_EPOCH; epoch zero when unset, so seeded
// runs stay byte-reproducible by default.
std::string report_timestamp();

}  // namespace debias
