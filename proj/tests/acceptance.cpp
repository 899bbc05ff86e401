// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "debias/classifier.hpp"
#include "debias/commands.hpp"
#include "debias/config.hpp"
#include "debias/corpus.hpp"
#include "debias/det_rng.hpp"
#include "debias/detection.hpp"
#include "debias/embeddings.hpp"
#include "debias/errors.hpp"
#include "debias/metrics.hpp"
#include "debias/replacement.hpp"
#include "debias/tagging.hpp"
#include "debias/wordnet.hpp"
#include "httplib.h"
#include "json.hpp"

namespace {

using namespace debias;
namespace fs = std::filesystem;

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::string fmt_seconds(double s) {
    std::ostringstream out;
    out.precision(2);
    out << std::fixed << s << "s";
    return out.str();
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string text;
    for (const auto& t : tokens) {
        if (!text.empty()) text += ' ';
        text += t;
    }
    return text;
}

Document make_doc(std::string id, std::vector<std::string> tokens, Label label) {
    Document doc;
    doc.id = std::move(id);
    doc.tokens = std::move(tokens);
    doc.raw_text = join_tokens(doc.tokens);
    doc.label = label;
    return doc;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "debias_acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------------------
// Criterion 1: rank-based ROC-AUC against exhaustive pair counting, and the
// pinned-bias variants against independent single-pass formulas.

double pair_count_auc(const std::vector<double>& scores,
                      const std::vector<Label>& labels) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != Label::Hateful) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != Label::Neutral) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

Outcome criterion1() {
    Timer timer;
    DetRng rng(41);

    double max_diff = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 2 + rng.next_below(49);
        std::vector<double> scores(n);
        std::vector<Label> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.next_below(2) == 0) {
                scores[i] = static_cast<double>(rng.next_below(9)) / 8.0;
            } else {
                scores[i] = rng.next_double();
            }
            labels[i] = rng.next_below(2) ? Label::Hateful : Label::Neutral;
        }
        labels[0] = Label::Hateful;
        labels[1] = Label::Neutral;
        double diff = std::abs(roc_auc(scores, labels) -
                               pair_count_auc(scores, labels));
        max_diff = std::max(max_diff, diff);
    }
    if (max_diff > 1e-12) {
        return {false, "roc_auc deviates from pair counting by " +
                           std::to_string(max_diff)};
    }

    int pb_mismatches = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t m = 1 + rng.next_below(20);
        std::map<std::string, double> probes;
        for (std::size_t i = 0; i < m; ++i) {
            double p = rng.next_below(2)
                           ? rng.next_double()
                           : static_cast<double>(rng.next_below(17)) / 16.0;
            probes["w" + std::to_string(i)] = p;
        }
        double n = static_cast<double>(probes.size());
        double mean = 0.0;
        for (const auto& [w, p] : probes) mean += p;
        mean /= n;
        double oracle_mean = 0.0, oracle_sym = 0.0, oracle_asym = 0.0;
        for (const auto& [w, p] : probes) {
            oracle_mean += std::abs(p - mean);
            oracle_sym += std::abs(p - 0.5);
            oracle_asym += p > 0.5 ? p - 0.5 : 0.0;
        }
        oracle_mean /= n;
        oracle_sym /= n;
        oracle_asym /= n;
        if (pb_from_probes(probes, PinnedVariant::Mean) != oracle_mean ||
            pb_from_probes(probes, PinnedVariant::Sym) != oracle_sym ||
            pb_from_probes(probes, PinnedVariant::Asym) != oracle_asym) {
            ++pb_mismatches;
        }
    }
    double elapsed = timer.seconds();
    if (pb_mismatches > 0) {
        return {false, std::to_string(pb_mismatches) +
                           "/100 probe sets gave inexact pinned-bias values"};
    }
    if (elapsed >= 5.0) {
        return {false, "metric oracles took " + fmt_seconds(elapsed)};
    }
    std::ostringstream detail;
    detail << "200 auc instances (max diff " << max_diff
           << "), 100 probe sets exact for mean/sym/asym, "
           << fmt_seconds(elapsed);
    return {true, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 2: detect_soac against a from-scratch reimplementation of the
// cutoff, skew filter, and (df, df_pos/df) descending sort.

std::vector<BswCandidate> brute_force_ranking(const LabeledCorpus& corpus,
                                              const DetectionConfig& config) {
    struct Counts {
        std::int64_t tf = 0, df = 0, df_pos = 0, df_neg = 0;
    };
    std::map<std::string, Counts> counts;
    for (const auto& doc : corpus.documents) {
        std::set<std::string> seen;
        for (const auto& token : doc.tokens) {
            counts[token].tf += 1;
            seen.insert(token);
        }
        for (const auto& token : seen) {
            Counts& c = counts[token];
            c.df += 1;
            if (*doc.label == Label::Hateful) c.df_pos += 1;
            else c.df_neg += 1;
        }
    }
    std::vector<BswCandidate> out;
    for (const auto& [word, c] : counts) {
        if (c.tf <= config.tf_cutoff) continue;
        if (c.df_pos <= c.df_neg) continue;
        if (config.abusive_words.count(word)) continue;
        BswCandidate cand;
        cand.word = word;
        cand.score = static_cast<double>(c.df_pos) / static_cast<double>(c.df);
        out.push_back(std::move(cand));
    }
    std::stable_sort(out.begin(), out.end(),
                     [&](const BswCandidate& a, const BswCandidate& b) {
                         std::int64_t da = counts[a.word].df;
                         std::int64_t db = counts[b.word].df;
                         if (da != db) return da > db;
                         if (*a.score != *b.score) return *a.score > *b.score;
                         return a.word < b.word;
                     });
    if (out.size() > config.top_n) out.resize(config.top_n);
    return out;
}

Outcome criterion2() {
    Timer timer;
    for (int trial = 0; trial < 50; ++trial) {
        DetRng rng(900 + static_cast<std::uint64_t>(trial));
        std::size_t n_docs = 20 + rng.next_below(481);
        LabeledCorpus corpus;
        corpus.name = "synthetic";
        for (std::size_t i = 0; i < n_docs; ++i) {
            std::size_t n_tokens = 2 + rng.next_below(7);
            std::vector<std::string> tokens;
            for (std::size_t t = 0; t < n_tokens; ++t) {
                tokens.push_back("w" + std::to_string(rng.next_below(25)));
            }
            corpus.documents.push_back(make_doc(
                "syn:" + std::to_string(i), std::move(tokens),
                rng.next_below(2) ? Label::Hateful : Label::Neutral));
        }
        DetectionConfig config;
        config.tf_cutoff = static_cast<std::int64_t>(rng.next_below(6));
        config.top_n = rng.next_below(13);
        for (int w = 0; w < 25; ++w) {
            if (rng.next_below(8) == 0) {
                config.abusive_words.insert("w" + std::to_string(w));
            }
        }

        auto got = detect_soac(build_vocabulary(corpus), config);
        auto want = brute_force_ranking(corpus, config);
        bool equal = got.size() == want.size();
        for (std::size_t i = 0; equal && i < got.size(); ++i) {
            equal = got[i].word == want[i].word && *got[i].score == *want[i].score;
        }
        if (!equal) {
            return {false, "trial " + std::to_string(trial) + " (" +
                               std::to_string(n_docs) +
                               " docs) ranked differently"};
        }
    }
    double elapsed = timer.seconds();
    if (elapsed >= 10.0) {
        return {false, "ranking comparison took " + fmt_seconds(elapsed)};
    }
    return {true, "50 corpora ranked identically to the brute-force rule, " +
                      fmt_seconds(elapsed)};
}

// ---------------------------------------------------------------------------
// Criterion 3: planted-bias pipeline. A 2,000-document corpus where five
// neutral tokens co-occur with Hateful 90% of the time must be flagged by
// SOAC and SPCPD; centroid replacement plus retraining must cut PB_asym over
// the planted set by half without costing test ROC-AUC.

constexpr int kPlantedDim = 128;

Vector random_vector(std::uint64_t seed) {
    DetRng rng(seed);
    Vector v(kPlantedDim);
    for (double& x : v) x = 2.0 * rng.next_double() - 1.0;
    return v;
}

struct PlantedFixture {
    LabeledCorpus train;
    LabeledCorpus test;
    std::vector<std::string> planted;
    std::set<std::string> abusive;
    EmbeddingTable table;
};

PlantedFixture make_planted_fixture() {
    PlantedFixture fx;
    fx.train.name = "planted";
    fx.test.name = "planted_test";
    for (int k = 0; k < 5; ++k) {
        fx.planted.push_back("planted" + std::to_string(k));
    }
    for (int s = 0; s < 6; ++s) {
        fx.abusive.insert("slur" + std::to_string(s));
    }

    auto balanced_words = [](int i) {
        std::vector<std::string> tokens;
        for (int j = 0; j < 20; ++j) {
            if ((i + j) % 4 == 0) tokens.push_back("bal" + std::to_string(j));
        }
        return tokens;
    };
    // Train: 800 Hateful then 800 Neutral. Planted word k covers Hateful
    // docs [144k, 144k+144) and Neutral docs [16k, 16k+16), so each planted
    // token sits in 160 train documents at a 90% Hateful rate.
    for (int i = 0; i < 800; ++i) {
        std::vector<std::string> tokens = balanced_words(i);
        tokens.push_back("slur" + std::to_string(i % 6));
        if (i < 720) tokens.push_back(fx.planted[i / 144]);
        fx.train.documents.push_back(
            make_doc("planted:h" + std::to_string(i), std::move(tokens),
                     Label::Hateful));
    }
    for (int i = 0; i < 800; ++i) {
        std::vector<std::string> tokens = balanced_words(i);
        tokens.push_back("calm" + std::to_string(i % 6));
        if (i < 80) tokens.push_back(fx.planted[i / 16]);
        fx.train.documents.push_back(
            make_doc("planted:n" + std::to_string(i), std::move(tokens),
                     Label::Neutral));
    }
    // Test: 200 + 200 with the same construction at 36/4 docs per planted
    // word, keeping the corpus-wide co-occurrence rate at exactly 90%.
    for (int i = 0; i < 200; ++i) {
        std::vector<std::string> tokens = balanced_words(i);
        tokens.push_back("slur" + std::to_string(i % 6));
        if (i < 180) tokens.push_back(fx.planted[i / 36]);
        fx.test.documents.push_back(
            make_doc("planted:th" + std::to_string(i), std::move(tokens),
                     Label::Hateful));
    }
    for (int i = 0; i < 200; ++i) {
        std::vector<std::string> tokens = balanced_words(i);
        tokens.push_back("calm" + std::to_string(i % 6));
        if (i < 20) tokens.push_back(fx.planted[i / 4]);
        fx.test.documents.push_back(
            make_doc("planted:tn" + std::to_string(i), std::move(tokens),
                     Label::Neutral));
    }

    std::set<std::string> words;
    for (const auto* corpus : {&fx.train, &fx.test}) {
        for (const auto& doc : corpus->documents) {
            words.insert(doc.tokens.begin(), doc.tokens.end());
        }
    }
    fx.table = EmbeddingTable(kPlantedDim);
    for (const auto& word : words) {
        fx.table.add_entry(word, random_vector(fnv1a64(word)));
    }
    return fx;
}

std::vector<Label> labels_of(const LabeledCorpus& corpus) {
    std::vector<Label> labels;
    for (const auto& doc : corpus.documents) labels.push_back(*doc.label);
    return labels;
}

std::vector<double> predict_corpus(ClassifierBackend& backend,
                                   const LabeledCorpus& corpus) {
    std::vector<double> scores;
    for (const auto& doc : corpus.documents) {
        scores.push_back(backend.predict(doc.raw_text).p_hateful);
    }
    return scores;
}

Outcome criterion3() {
    Timer timer;
    PlantedFixture fx = make_planted_fixture();
    std::size_t total_docs =
        fx.train.documents.size() + fx.test.documents.size();
    if (total_docs != 2000) {
        return {false, "fixture has " + std::to_string(total_docs) + " docs"};
    }
    std::set<std::string> planted_set(fx.planted.begin(), fx.planted.end());

    DetectionConfig soac_config;
    soac_config.tf_cutoff = 10;
    soac_config.top_n = 10;
    soac_config.abusive_words = fx.abusive;
    auto ranked = detect_soac(build_vocabulary(fx.train), soac_config);
    std::set<std::string> ranked_words;
    for (const auto& c : ranked) ranked_words.insert(c.word);
    for (const auto& word : fx.planted) {
        if (!ranked_words.count(word)) {
            return {false, "soac top-10 missed " + word};
        }
    }

    ReplacementStrategy strategy;
    strategy.kind = ReplacementStrategy::Kind::Centroid;
    strategy.centroid_k = 15;
    BuiltinPosTagger pos_tagger;
    ReplacementResources res;
    res.pos_tagger = &pos_tagger;
    res.lexicon = &pos_tagger;
    res.embeddings = &fx.table;

    double pb_biased_sum = 0.0, pb_debiased_sum = 0.0;
    double auc_biased_sum = 0.0, auc_debiased_sum = 0.0;
    for (int run = 0; run < 5; ++run) {
        // Short training keeps probe outputs off the 1.0 ceiling; a fully
        // separable synthetic corpus would otherwise pin both models at the
        // metric's maximum and hide the replacement effect.
        TrainConfig tc;
        tc.learning_rate = 0.04;
        tc.l2 = 0.0;
        tc.epochs = 3;
        tc.batch_size = 32;
        tc.seed = 100 + static_cast<std::uint64_t>(run);

        LinearModel biased = train(fx.train, fx.table, tc);
        LocalBackend biased_backend(biased, fx.table);

        DetectionConfig spcpd_config;
        spcpd_config.tau = 0.5;
        spcpd_config.top_n = 10;
        auto flagged = detect_spcpd(biased_backend, fx.planted, spcpd_config);
        if (flagged.size() != fx.planted.size()) {
            return {false, "seed " + std::to_string(tc.seed) +
                               ": spcpd flagged only " +
                               std::to_string(flagged.size()) +
                               "/5 planted words"};
        }
        pb_biased_sum += pb_from_probes(probe_words(biased_backend, planted_set),
                                        PinnedVariant::Asym);
        auc_biased_sum +=
            roc_auc(predict_corpus(biased_backend, fx.test), labels_of(fx.test));

        DebiasedCorpus rewritten =
            apply_strategy(fx.train, planted_set, strategy, res);
        EmbeddingTable table = fx.table;
        for (const auto& [tag, vec] : rewritten.injected_vectors) {
            table.inject(tag, vec);
        }
        LinearModel debiased = train(rewritten.corpus, table, tc);
        LocalBackend debiased_backend(debiased, table);
        pb_debiased_sum += pb_from_probes(
            probe_words(debiased_backend, planted_set), PinnedVariant::Asym);
        auc_debiased_sum += roc_auc(predict_corpus(debiased_backend, fx.test),
                                    labels_of(fx.test));
    }

    double pb_biased = pb_biased_sum / 5.0;
    double pb_debiased = pb_debiased_sum / 5.0;
    double auc_biased = auc_biased_sum / 5.0;
    double auc_debiased = auc_debiased_sum / 5.0;
    double elapsed = timer.seconds();

    std::ostringstream detail;
    detail.precision(3);
    detail << "pb_asym " << pb_biased << " -> " << pb_debiased << " ("
           << (pb_biased > 0 ? 100.0 * (1.0 - pb_debiased / pb_biased) : 0.0)
           << "% drop), auc " << auc_biased << " -> " << auc_debiased << ", "
           << fmt_seconds(elapsed);
    bool pass = pb_debiased <= 0.5 * pb_biased &&
                auc_biased - auc_debiased <= 0.05 && elapsed < 120.0;
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 4: climbing the real WordNet 3.0 noun hierarchy reproduces the
// published generalization rows; each listed word must show up among the
// candidates at its level. A row word listed for itself passes when WordNet
// knows the word at all ("keep the original"), and "-" marks an empty cell.

Outcome criterion4() {
    struct Row {
        const char* word;
        const char* levels[6];
    };
    const Row rows[] = {
        {"sikh", {"disciple", "disciple", "follower", "person", "cause", "entity"}},
        {"homosexual", {"homosexual", "person", "cause", "entity", "entity", "object"}},
        {"queer", {"faggot", "homosexual", "homosexual", "person", "cause", "entity"}},
        {"gay", {"homosexual", "person", "cause", "entity", "entity", "object"}},
        {"straight", {"homosexual", "person", "cause", "collection", "entity", "object"}},
        {"muslim", {"person", "person", "person", "cause", "entity", "entity"}},
        {"deaf", {"deaf", "people", "group", "abstraction", "entity", "-"}},
        {"latino", {"inhabitant", "inhabitant", "inhabitant", "person", "cause", "entity"}},
    };
    std::unordered_set<std::string> vocab;
    for (const Row& row : rows) {
        vocab.insert(row.word);
        for (const char* cell : row.levels) {
            if (std::string(cell) != "-") vocab.insert(cell);
        }
    }

    WordNetDb db = load_wordnet(std::string(TEST_DATA_DIR) + "/wordnet30");
    Timer timer;
    int checked = 0;
    int matched = 0;
    std::vector<std::string> failures;
    for (const Row& row : rows) {
        for (int level = 0; level < 6; ++level) {
            std::string expected = row.levels[level];
            if (expected == "-") continue;
            ++checked;
            bool ok;
            if (expected == row.word) {
                ok = db.senses(row.word) != nullptr;
            } else {
                auto candidates =
                    hypernym_candidates(db, row.word, level, vocab);
                ok = std::find(candidates.begin(), candidates.end(),
                               expected) != candidates.end();
            }
            if (ok) {
                ++matched;
            } else {
                failures.push_back(std::string(row.word) + "@L" +
                                   std::to_string(level) + " expected '" +
                                   expected + "'");
            }
        }
    }
    double elapsed = timer.seconds();

    std::ostringstream detail;
    detail << matched << "/" << checked << " table cells reproduced";
    if (!failures.empty()) {
        detail << " (";
        for (std::size_t i = 0; i < failures.size(); ++i) {
            if (i) detail << "; ";
            detail << failures[i];
        }
        detail << ")";
    }
    detail << ", " << fmt_seconds(elapsed) << " after load";
    return {failures.empty() && elapsed < 10.0, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 5: template generation balances labels exactly, and the pinned
// subgroup AUC gap separates a subgroup-blind scorer from one that inflates a
// single identity's Hateful probability.

Outcome criterion5() {
    Timer timer;
    fs::path dir = scratch_dir("madlibs");
    fs::path spec_path = dir / "templates.txt";
    write_file(spec_path,
               "[templates]\n"
               "Hateful\tall <identity> folk are <insult> and should leave\n"
               "Hateful\ti think <identity> people are <insult>\n"
               "Neutral\tmy <identity> neighbor made <dish> last night\n"
               "Neutral\tthe <identity> center hosts a <dish> fair\n"
               "[dict:identity]\n"
               "gay\n"
               "muslim\n"
               "immigrant\n"
               "refugee\n"
               "[dict:insult]\n"
               "vermin\n"
               "parasites\n"
               "trash\n"
               "[dict:dish]\n"
               "soup\n"
               "bread\n"
               "pasta\n");
    MadlibsSpec spec = load_madlibs_spec(spec_path.string());
    spec.target_size = 1000;
    spec.seed = 21;
    LabeledCorpus corpus = generate_madlibs(spec);

    std::size_t hateful = 0;
    for (const auto& doc : corpus.documents) {
        hateful += *doc.label == Label::Hateful;
    }
    if (corpus.documents.size() != 1000 || hateful != 500) {
        return {false, "generated " + std::to_string(corpus.documents.size()) +
                           " docs with " + std::to_string(hateful) +
                           " Hateful"};
    }
    if (corpus.annotations.size() != 1000) {
        return {false, "only " + std::to_string(corpus.annotations.size()) +
                           "/1000 docs carry an identity annotation"};
    }

    std::vector<double> blind, biased;
    std::vector<Label> labels;
    std::vector<std::optional<std::string>> annotation;
    for (const auto& doc : corpus.documents) {
        double noise =
            static_cast<double>((fnv1a64(doc.id) >> 8) % 10001) / 10000.0;
        double base =
            (*doc.label == Label::Hateful ? 0.7 : 0.3) + 0.1 * (noise - 0.5);
        const std::string& identity = corpus.annotations.at(doc.id);
        blind.push_back(base);
        biased.push_back(base + (identity == "gay" ? 0.4 : 0.0));
        labels.push_back(*doc.label);
        annotation.emplace_back(identity);
    }
    std::set<std::string> identities{"gay", "muslim", "immigrant", "refugee"};
    double blind_pauc =
        pauc_from_scores(blind, labels, annotation, identities, 31).value;
    double biased_pauc =
        pauc_from_scores(biased, labels, annotation, identities, 31).value;
    double elapsed = timer.seconds();

    std::ostringstream detail;
    detail.precision(4);
    detail << "500/500 labels, blind pauc " << blind_pauc << ", skewed pauc "
           << biased_pauc << ", " << fmt_seconds(elapsed);
    bool pass = blind_pauc < 0.02 && biased_pauc >= 10.0 * blind_pauc &&
                biased_pauc > blind_pauc && elapsed < 30.0;
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 6: the debias command is byte-reproducible across two runs with
// the same config and seed.

Outcome criterion6() {
    fs::path dir = scratch_dir("determinism");
    fs::path corpus_path = dir / "corpus.csv";
    fs::path embeddings_path = dir / "vectors.txt";

    std::ostringstream csv;
    csv << "text,label\n";
    for (int i = 0; i < 60; ++i) {
        csv << "the people were vile and angry w" << i % 5 << ",Hateful\n";
    }
    for (int i = 0; i < 60; ++i) {
        csv << "the people were calm and kind w" << i % 5 << ",Neutral\n";
    }
    write_file(corpus_path, csv.str());

    std::ostringstream vectors;
    vectors.precision(6);
    vectors << std::fixed;
    for (const char* word :
         {"the", "people", "were", "vile", "and", "angry", "calm", "kind",
          "w0", "w1", "w2", "w3", "w4"}) {
        DetRng rng(fnv1a64(word));
        vectors << word;
        for (int d = 0; d < 6; ++d) {
            vectors << ' ' << 2.0 * rng.next_double() - 1.0;
        }
        vectors << '\n';
    }
    write_file(embeddings_path, vectors.str());

    Config config = Config::from_values({
        {"corpus", corpus_path.string()},
        {"embeddings", embeddings_path.string()},
        {"out", (dir / "out").string()},
        {"seed", "5"},
        {"runs", "2"},
        {"strategy", "centroid"},
        {"centroid_k", "3"},
        {"epochs", "30"},
        {"batch_size", "16"},
        {"learning_rate", "0.2"},
        {"tf_cutoff", "1"},
        {"top_n", "8"},
    });

    const char* artifacts[] = {"debiased_train.csv", "replacement_log.json",
                               "model.json",         "bsw.json",
                               "bsw.txt",            "report.json"};
    std::ostringstream log1, log2;
    cmd_debias(config, log1);
    std::map<std::string, std::string> first;
    for (const char* name : artifacts) {
        first[name] = slurp(dir / "out" / name);
    }
    cmd_debias(config, log2);

    std::vector<std::string> mismatched;
    for (const char* name : artifacts) {
        if (slurp(dir / "out" / name) != first[name]) {
            mismatched.push_back(name);
        }
    }
    if (log1.str() != log2.str()) mismatched.push_back("command log");
    if (!mismatched.empty()) {
        std::string detail = "differs between runs:";
        for (const auto& name : mismatched) detail += " " + name;
        return {false, detail};
    }
    return {true, "6 artifacts and the command log byte-identical across reruns"};
}

// ---------------------------------------------------------------------------
// Criterion 7: analytic gradients against central finite differences.

Outcome criterion7() {
    double max_rel = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        DetRng rng(7000 + static_cast<std::uint64_t>(trial));
        std::size_t dim = 2 + rng.next_below(9);
        std::size_t n_docs = 3 + rng.next_below(10);
        std::vector<Vector> features(n_docs, Vector(dim));
        std::vector<int> labels(n_docs);
        for (std::size_t i = 0; i < n_docs; ++i) {
            for (double& x : features[i]) x = 2.0 * rng.next_double() - 1.0;
            labels[i] = static_cast<int>(rng.next_below(2));
        }
        Vector weights(dim);
        for (double& w : weights) w = 2.0 * rng.next_double() - 1.0;
        double bias = 2.0 * rng.next_double() - 1.0;
        double l2 = trial % 3 == 0 ? 0.0 : (trial % 3 == 1 ? 1e-4 : 1e-2);

        Vector grad(dim);
        double grad_bias = 0.0;
        logistic_gradient(features, labels, weights, bias, l2, grad, grad_bias);

        const double eps = 1e-5;
        auto check = [&](double analytic, double fd) {
            double rel = std::abs(analytic - fd) /
                         std::max({std::abs(analytic), std::abs(fd), 1e-8});
            max_rel = std::max(max_rel, rel);
        };
        for (std::size_t d = 0; d < dim; ++d) {
            Vector up = weights, down = weights;
            up[d] += eps;
            down[d] -= eps;
            double fd = (logistic_loss(features, labels, up, bias, l2) -
                         logistic_loss(features, labels, down, bias, l2)) /
                        (2.0 * eps);
            check(grad[d], fd);
        }
        double fd_bias =
            (logistic_loss(features, labels, weights, bias + eps, l2) -
             logistic_loss(features, labels, weights, bias - eps, l2)) /
            (2.0 * eps);
        check(grad_bias, fd_bias);
    }
    std::ostringstream detail;
    detail << "max relative error " << max_rel << " over 20 random points";
    return {max_rel < 1e-4, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 8: probing 1,000 words through a flaky HTTP server. 10% of words
// fail their first attempt; one word hard-fails mid-run to simulate a kill,
// and the resume run must finish without re-probing completed words.

class FlakyServer {
public:
    explicit FlakyServer(std::string kill_word)
        : kill_word_(std::move(kill_word)) {
        server_.Post("/predict", [this](const httplib::Request& req,
                                        httplib::Response& res) {
            handle(req, res);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~FlakyServer() {
        server_.stop();
        thread_.join();
    }

    std::string endpoint() const {
        return "http://127.0.0.1:" + std::to_string(port_) + "/predict";
    }

    void end_kill_mode() { kill_mode_ = false; }

    int transient_failures() const {
        std::lock_guard<std::mutex> lock(mu_);
        return transient_failures_;
    }

    std::map<std::string, int> success_counts() const {
        std::lock_guard<std::mutex> lock(mu_);
        return successes_;
    }

private:
    void handle(const httplib::Request& req, httplib::Response& res) {
        std::string word =
            nlohmann::json::parse(req.body).at("text").get<std::string>();
        std::lock_guard<std::mutex> lock(mu_);
        int attempt = ++attempts_[word];
        if (kill_mode_ && word == kill_word_) {
            res.status = 500;
            res.set_content("down", "text/plain");
            return;
        }
        if (attempt == 1 && fnv1a64(word) % 10 == 0) {
            ++transient_failures_;
            res.status = 500;
            res.set_content("flaky", "text/plain");
            return;
        }
        ++successes_[word];
        nlohmann::json out;
        out["p_hateful"] =
            static_cast<double>((fnv1a64(word) >> 16) % 10000) / 9999.0;
        res.set_content(out.dump(), "application/json");
    }

    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::string kill_word_;
    std::atomic<bool> kill_mode_{true};
    mutable std::mutex mu_;
    std::map<std::string, int> attempts_;
    std::map<std::string, int> successes_;
    int transient_failures_ = 0;
};

Outcome criterion8() {
    Timer timer;
    fs::path dir = scratch_dir("probe");
    std::vector<std::string> words;
    std::string wordlist;
    for (int i = 1; i <= 1000; ++i) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "w%04d", i);
        words.push_back(buf);
        wordlist += buf;
        wordlist += '\n';
    }
    fs::path wordlist_path = dir / "words.txt";
    write_file(wordlist_path, wordlist);
    const std::string kill_word = "w0600";

    int expected_transients = 0;
    for (const auto& word : words) {
        if (word != kill_word && fnv1a64(word) % 10 == 0) ++expected_transients;
    }

    FlakyServer server(kill_word);
    Config config = Config::from_values({
        {"wordlist", wordlist_path.string()},
        {"out", (dir / "out").string()},
        {"endpoint", server.endpoint()},
        {"max_retries", "2"},
        {"backoff_ms", "1"},
    });

    std::ostringstream log1;
    bool interrupted = false;
    try {
        cmd_probe(config, log1);
    } catch (const TransportError& e) {
        interrupted = e.failed_text == kill_word;
    }
    if (!interrupted) {
        return {false, "first run did not stop at the hard-failing word"};
    }
    auto after_first = server.success_counts();
    if (after_first.size() != 599) {
        return {false, "first run completed " +
                           std::to_string(after_first.size()) +
                           " words, expected 599"};
    }

    server.end_kill_mode();
    std::ostringstream log2;
    cmd_probe(config, log2);
    if (log2.str().find("resuming: 599 words already probed") ==
        std::string::npos) {
        return {false, "resume run did not pick up the partial file"};
    }

    auto counts = server.success_counts();
    if (counts.size() != 1000) {
        return {false, "served " + std::to_string(counts.size()) +
                           "/1000 distinct words"};
    }
    for (const auto& [word, n] : counts) {
        if (n != 1) {
            return {false, word + " was probed " + std::to_string(n) +
                               " times after resume"};
        }
    }
    if (server.transient_failures() != expected_transients) {
        return {false, "saw " + std::to_string(server.transient_failures()) +
                           " transient failures, expected " +
                           std::to_string(expected_transients)};
    }

    auto ranked = nlohmann::json::parse(slurp(dir / "out" / "probe_ranked.json"));
    const auto& arr = ranked.at("words");
    if (arr.size() != 1000) {
        return {false, "ranked output holds " + std::to_string(arr.size()) +
                           " words"};
    }
    for (std::size_t i = 1; i < arr.size(); ++i) {
        if (arr[i - 1].at("p_hateful").get<double>() <
            arr[i].at("p_hateful").get<double>()) {
            return {false, "ranked output is not sorted by p_hateful"};
        }
    }

    std::ostringstream detail;
    detail << "1000 words probed exactly once across kill and resume ("
           << expected_transients << " transient failures retried), "
           << fmt_seconds(timer.seconds());
    return {true, detail.str()};
}

}  // namespace

int main() {
    unsetenv("SOURCE_DATE_EPOCH");
    struct Criterion {
        int number;
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {1, "metric oracles", criterion1},
        {2, "soac ranking fidelity", criterion2},
        {3, "planted-bias pipeline", criterion3},
        {4, "wordnet generalization table", criterion4},
        {5, "madlibs subgroup gap", criterion5},
        {6, "debias determinism", criterion6},
        {7, "gradient check", criterion7},
        {8, "probe resilience", criterion8},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        std::cout << "criterion " << c.number << " (" << c.name << "): "
                  << (outcome.pass ? "PASS" : "FAIL") << " — " << outcome.detail
                  << "\n";
        if (!outcome.pass) ++failures;
    }
    return failures;
}
