#include "debias/metrics.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <numeric>

#include "debias/det_rng.hpp"
#include "json.hpp"

namespace debias {

double roc_auc(const std::vector<double>& scores,
               const std::vector<Label>& labels) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("scores and labels differ in length");
    }
    std::size_t n = scores.size();
    std::size_t positives = 0;
    for (Label l : labels) positives += l == Label::Hateful;
    std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) {
        throw DataError("ROC-AUC undefined: only one class present");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] < scores[b];
    });

    // Average ranks over tie groups, then the Mann-Whitney statistic.
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == Label::Hateful) positive_rank_sum += avg_rank;
        }
        i = j;
    }
    double u = positive_rank_sum -
               static_cast<double>(positives) * (positives + 1) / 2.0;
    return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

const char* pinned_variant_name(PinnedVariant v) {
    switch (v) {
        case PinnedVariant::Mean: return "mean";
        case PinnedVariant::Sym: return "sym";
        case PinnedVariant::Asym: return "asym";
    }
    return "sym";
}

double pb_from_probes(const std::map<std::string, double>& probes,
                      PinnedVariant variant) {
    if (probes.empty()) {
        throw std::invalid_argument("pinned bias over an empty word set");
    }
    double pin = 0.5;
    if (variant == PinnedVariant::Mean) {
        double sum = 0.0;
        for (const auto& [word, p] : probes) sum += p;
        pin = sum / static_cast<double>(probes.size());
    }
    double total = 0.0;
    for (const auto& [word, p] : probes) {
        double target = variant == PinnedVariant::Asym ? std::min(p, 0.5) : pin;
        total += std::abs(p - target);
    }
    return total / static_cast<double>(probes.size());
}

std::map<std::string, double> probe_words(ClassifierBackend& backend,
                                          const std::set<std::string>& words) {
    std::map<std::string, double> probes;
    for (const auto& word : words) {
        try {
            probes[word] = backend.predict(word).p_hateful;
        } catch (const TransportError& e) {
            throw PbInterrupted(e, std::move(probes));
        }
    }
    return probes;
}

PbResult pb(ClassifierBackend& backend, const std::set<std::string>& words,
            PinnedVariant variant) {
    if (words.empty()) {
        throw std::invalid_argument("pinned bias over an empty word set");
    }
    PbResult result;
    result.probes = probe_words(backend, words);
    result.value = pb_from_probes(result.probes, variant);
    return result;
}

PaucResult pauc_from_scores(
    const std::vector<double>& scores, const std::vector<Label>& labels,
    const std::vector<std::optional<std::string>>& annotation,
    const std::set<std::string>& bsw_words, std::uint64_t seed) {
    std::size_t n = scores.size();
    if (labels.size() != n || annotation.size() != n) {
        throw std::invalid_argument("scores, labels and annotations differ in length");
    }

    PaucResult result;
    std::vector<double> pooled_scores;
    std::vector<Label> pooled_labels;
    std::vector<std::pair<std::string, std::pair<std::vector<double>, std::vector<Label>>>>
        subgroups;

    for (const auto& word : bsw_words) {
        std::vector<std::size_t> in_group, out_group;
        for (std::size_t i = 0; i < n; ++i) {
            if (annotation[i] && *annotation[i] == word) in_group.push_back(i);
            else out_group.push_back(i);
        }
        if (in_group.empty()) {
            result.skipped.push_back(word);
            continue;
        }
        std::size_t want = in_group.size();
        if (out_group.size() < want) {
            result.capped.push_back(word);
            want = out_group.size();
        }
        // Partial Fisher-Yates over corpus-ordered candidates; seed mixed
        // with the word so subgroups draw independent streams.
        DetRng rng(splitmix64(seed ^ fnv1a64(word)));
        for (std::size_t i = 0; i < want; ++i) {
            std::size_t j = i + static_cast<std::size_t>(
                                    rng.next_below(out_group.size() - i));
            std::swap(out_group[i], out_group[j]);
        }
        out_group.resize(want);

        std::vector<double> group_scores;
        std::vector<Label> group_labels;
        for (std::size_t idx : in_group) {
            group_scores.push_back(scores[idx]);
            group_labels.push_back(labels[idx]);
        }
        for (std::size_t idx : out_group) {
            group_scores.push_back(scores[idx]);
            group_labels.push_back(labels[idx]);
        }
        pooled_scores.insert(pooled_scores.end(), group_scores.begin(),
                             group_scores.end());
        pooled_labels.insert(pooled_labels.end(), group_labels.begin(),
                             group_labels.end());
        subgroups.push_back({word, {std::move(group_scores), std::move(group_labels)}});
    }

    if (subgroups.empty()) {
        throw DataError("no bias-sensitive word has annotated documents");
    }
    result.overall_auc = roc_auc(pooled_scores, pooled_labels);
    for (const auto& [word, data] : subgroups) {
        double auc_w = roc_auc(data.first, data.second);
        result.per_word_auc[word] = auc_w;
        result.value += std::abs(result.overall_auc - auc_w);
    }
    return result;
}

PaucResult pauc(ClassifierBackend& backend, const LabeledCorpus& corpus,
                const std::set<std::string>& bsw_words, std::uint64_t seed) {
    std::size_t n = corpus.documents.size();
    std::vector<double> scores;
    std::vector<Label> labels;
    std::vector<std::optional<std::string>> annotation;
    scores.reserve(n);
    for (const auto& doc : corpus.documents) {
        if (!doc.label) {
            throw DataError("unlabeled document " + doc.id +
                            " in evaluation corpus");
        }
        scores.push_back(backend.predict(doc.raw_text).p_hateful);
        labels.push_back(*doc.label);
        auto it = corpus.annotations.find(doc.id);
        if (it != corpus.annotations.end()) annotation.emplace_back(it->second);
        else annotation.emplace_back(std::nullopt);
    }
    return pauc_from_scores(scores, labels, annotation, bsw_words, seed);
}

EvalReport aggregate_reports(const std::vector<EvalReport>& runs) {
    if (runs.empty()) {
        throw std::invalid_argument("no reports to aggregate");
    }
    EvalReport agg = runs.front();
    if (runs.size() == 1) return agg;

    double n = static_cast<double>(runs.size());
    agg.run_count = static_cast<int>(runs.size());
    agg.roc_auc = 0.0;
    agg.pb_mean = agg.pb_sym = agg.pb_asym = 0.0;
    bool all_pauc = true;
    double pauc_sum = 0.0;
    agg.per_word.clear();
    std::set<std::string> skipped;
    for (const auto& r : runs) {
        agg.roc_auc += r.roc_auc / n;
        agg.pb_mean += r.pb_mean / n;
        agg.pb_sym += r.pb_sym / n;
        agg.pb_asym += r.pb_asym / n;
        if (r.pauc) pauc_sum += *r.pauc / n;
        else all_pauc = false;
        for (const auto& [word, p] : r.per_word) agg.per_word[word] += p / n;
        skipped.insert(r.skipped_bsws.begin(), r.skipped_bsws.end());
    }
    agg.pauc = all_pauc ? std::optional<double>(pauc_sum) : std::nullopt;
    agg.skipped_bsws.assign(skipped.begin(), skipped.end());
    return agg;
}

std::string report_timestamp() {
    std::time_t epoch = 0;
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        epoch = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
    }
    std::tm tm{};
    gmtime_r(&epoch, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["dataset"] = report.dataset;
    j["detection"] = report.detection;
    j["replacement"] = report.replacement;
    j["run_count"] = report.run_count;
    j["roc_auc"] = report.roc_auc;
    j["pb_mean"] = report.pb_mean;
    j["pb_sym"] = report.pb_sym;
    j["pb_asym"] = report.pb_asym;
    if (report.pauc) j["pauc"] = *report.pauc;
    j["per_word"] = report.per_word;
    j["skipped_bsws"] = report.skipped_bsws;
    j["seed"] = report.seed;
    j["config_hash"] = report.config_hash;
    j["timestamp"] = report.timestamp;
    return j.dump(2) + "\n";
}

void write_report(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write report file: " + path);
    out << report_to_json(report);
}

}  // namespace debias
