#include "debias/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "debias/classifier.hpp"
#include "debias/corpus.hpp"
#include "debias/det_rng.hpp"
#include "debias/detection.hpp"
#include "debias/embeddings.hpp"
#include "debias/errors.hpp"
#include "debias/metrics.hpp"
#include "debias/remote.hpp"
#include "debias/replacement.hpp"
#include "debias/tagging.hpp"
#include "debias/wordnet.hpp"
#include "json.hpp"

namespace debias {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

CorpusFormat format_from(const Config& config) {
    std::string f = config.get_or("corpus_format", "csv");
    if (f == "csv") return CorpusFormat::Csv;
    if (f == "tsv") return CorpusFormat::Tsv;
    throw ConfigError("corpus_format must be csv or tsv, got: " + f);
}

CorpusSchema schema_from(const Config& config) {
    CorpusSchema schema;
    schema.text_column = config.get_or("text_column", "text");
    schema.label_column = config.get_or("label_column", "label");
    for (const auto& v :
         split_commas(config.get_or("labels_hateful", "Hateful,hateful,1"))) {
        schema.label_map[v] = Label::Hateful;
    }
    for (const auto& v :
         split_commas(config.get_or("labels_neutral", "Neutral,neutral,0"))) {
        schema.label_map[v] = Label::Neutral;
    }
    if (auto col = config.get("annotation_column")) {
        schema.annotation_column = *col;
    }
    return schema;
}

LabeledCorpus load_input_corpus(const Config& config) {
    std::string path = config.require("corpus");
    return load_corpus(path, format_from(config), schema_from(config),
                       fs::path(path).stem().string());
}

SplitRatios ratios_from(const Config& config) {
    SplitRatios ratios;
    ratios.train = config.get_double("split_train", 0.8);
    ratios.dev = config.get_double("split_dev", 0.1);
    ratios.test = config.get_double("split_test", 0.1);
    return ratios;
}

TrainConfig train_config_from(const Config& config, std::uint64_t seed) {
    TrainConfig tc;
    tc.learning_rate = config.get_double("learning_rate", 0.1);
    tc.l2 = config.get_double("l2", 1e-4);
    tc.epochs = static_cast<int>(config.get_int("epochs", 100));
    tc.batch_size = static_cast<int>(config.get_int("batch_size", 32));
    tc.seed = seed;
    return tc;
}

DetectionConfig detection_config_from(const Config& config) {
    DetectionConfig dc;
    dc.tf_cutoff = config.get_int("tf_cutoff", 10);
    dc.tau = config.get_double("tau", 0.5);
    dc.top_n = static_cast<std::size_t>(config.get_int("top_n", 10));
    if (auto path = config.get("abusive_dict")) {
        dc.abusive_words = load_word_set(*path);
    }
    return dc;
}

EmbeddingTable embeddings_from(const Config& config) {
    std::optional<std::size_t> limit;
    if (config.has("embeddings_limit")) {
        limit = static_cast<std::size_t>(config.get_int("embeddings_limit", 0));
    }
    return load_embeddings(config.require("embeddings"), limit);
}

ReplacementStrategy strategy_from(const Config& config, std::uint64_t seed) {
    ReplacementStrategy s;
    s.kind = parse_strategy_kind(config.get_or("strategy", "pos_tags"));
    s.knn_k = static_cast<std::size_t>(config.get_int("knn_k", 5));
    s.knn_seed = seed;
    s.wordnet_level = static_cast<int>(config.get_int("wordnet_level", 0));
    s.centroid_k = static_cast<std::size_t>(config.get_int("centroid_k", 5));
    return s;
}

fs::path out_dir(const Config& config) {
    fs::path dir = config.require("out");
    fs::create_directories(dir);
    return dir;
}

DetectionStrategy detection_strategy_from(const Config& config) {
    std::string s = config.get_or("detect_strategy", "soac");
    if (s == "manual") return DetectionStrategy::Manual;
    if (s == "soac") return DetectionStrategy::Soac;
    if (s == "spcpd") return DetectionStrategy::Spcpd;
    throw ConfigError("detect_strategy must be manual, soac or spcpd, got: " + s);
}

RemoteConfig remote_config_from(const Config& config) {
    RemoteConfig rc;
    rc.endpoint = config.require("endpoint");
    rc.qps = config.get_double("qps", 0.0);
    rc.auth_header = config.get_or("auth_header", "");
    rc.max_retries = static_cast<int>(config.get_int("max_retries", 5));
    rc.backoff_base =
        std::chrono::milliseconds(config.get_int("backoff_ms", 200));
    return rc;
}

// Owns whichever pieces the backend needs so callers can treat local and
// remote uniformly.
struct BackendHolder {
    LinearModel model;
    EmbeddingTable table;
    std::unique_ptr<ClassifierBackend> backend;
};

BackendHolder make_backend(const Config& config) {
    BackendHolder holder;
    if (config.has("endpoint")) {
        holder.backend = std::make_unique<RemoteBackend>(remote_config_from(config));
        return holder;
    }
    if (!config.has("model")) {
        throw ConfigError("need either 'endpoint' or 'model' in the config");
    }
    holder.model = load_model(config.require("model"));
    holder.table = embeddings_from(config);
    for (const auto& [tag, vec] : holder.model.injected) {
        holder.table.inject(tag, vec);
    }
    holder.backend = std::make_unique<LocalBackend>(holder.model, holder.table);
    return holder;
}

std::vector<double> score_corpus(ClassifierBackend& backend,
                                 const LabeledCorpus& corpus) {
    std::vector<double> scores;
    scores.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents) {
        scores.push_back(backend.predict(doc.raw_text).p_hateful);
    }
    return scores;
}

std::vector<Label> corpus_labels(const LabeledCorpus& corpus) {
    std::vector<Label> labels;
    labels.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents) {
        if (!doc.label) {
            throw DataError("unlabeled document " + doc.id);
        }
        labels.push_back(*doc.label);
    }
    return labels;
}

// Scores rewritten documents through their token lists rather than raw text.
std::vector<double> score_tokens(const LinearModel& model,
                                 const EmbeddingTable& table,
                                 const LabeledCorpus& corpus) {
    LocalBackend backend(model, table);
    std::vector<double> scores;
    scores.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents) {
        scores.push_back(sigmoid(backend.score(featurize(doc.tokens, table))));
    }
    return scores;
}

struct Taggers {
    std::unique_ptr<BuiltinPosTagger> builtin_pos;
    std::unique_ptr<PosTagger> pos;
    std::unique_ptr<NeTagger> ne;
};

Taggers taggers_from(const Config& config) {
    Taggers t;
    if (auto lex = config.get("lexicon")) {
        t.builtin_pos = std::make_unique<BuiltinPosTagger>(*lex);
    } else {
        t.builtin_pos = std::make_unique<BuiltinPosTagger>();
    }
    if (auto sidecar = config.get("pos_sidecar")) {
        t.pos = std::make_unique<SidecarPosTagger>(*sidecar);
    }
    if (auto gaz = config.get("gazetteer")) {
        t.ne = std::make_unique<BuiltinNeTagger>(*gaz);
    } else {
        t.ne = std::make_unique<BuiltinNeTagger>();
    }
    if (auto sidecar = config.get("ne_sidecar")) {
        t.ne = std::make_unique<SidecarNeTagger>(*sidecar);
    }
    return t;
}

const PosTagger& pos_tagger_of(const Taggers& t) {
    return t.pos ? *t.pos : static_cast<const PosTagger&>(*t.builtin_pos);
}

// Unigram terms from detection output; multiword terms are skipped with a
// warning since replacement works token by token.
std::set<std::string> unigram_words(const std::vector<BswCandidate>& candidates,
                                    std::ostream& log) {
    std::set<std::string> words;
    for (const auto& c : candidates) {
        if (c.multiword) {
            log << "warning: skipping multiword term '" << c.word
                << "' (unigram replacement only)\n";
        } else {
            words.insert(c.word);
        }
    }
    return words;
}

}  // namespace

void cmd_train(const Config& config, std::ostream& log) {
    require_readable(config, "corpus");
    require_readable(config, "embeddings");
    std::uint64_t seed = config.require_seed();
    fs::path dir = out_dir(config);
    std::string hash = config.hash();

    LabeledCorpus corpus = load_input_corpus(config);
    CorpusSplits splits = split_corpus(corpus, ratios_from(config), seed);
    EmbeddingTable table = embeddings_from(config);
    LinearModel model = train(splits.train, table, train_config_from(config, seed));

    LocalBackend backend(model, table);
    nlohmann::ordered_json report;
    report["dataset"] = corpus.name;
    report["config_hash"] = hash;
    report["documents"] = {{"train", splits.train.documents.size()},
                           {"dev", splits.dev.documents.size()},
                           {"test", splits.test.documents.size()}};
    report["train_loss"] = model.final_loss;
    for (const auto& [name, split] :
         {std::pair<const char*, const LabeledCorpus*>{"dev", &splits.dev},
          {"test", &splits.test}}) {
        if (split->documents.empty()) {
            report[std::string(name) + "_roc_auc"] = nullptr;
        } else {
            report[std::string(name) + "_roc_auc"] =
                roc_auc(score_corpus(backend, *split), corpus_labels(*split));
        }
    }
    report["timestamp"] = report_timestamp();

    fs::path model_path = dir / "model.json";
    save_model(model, model_path.string(), hash);
    std::ofstream rep(dir / "train_report.json", std::ios::binary);
    rep << report.dump(2) << '\n';
    log << "model: " << model_path.string() << "\n";
    log << "train loss: " << model.final_loss << "\n";
}

void cmd_detect(const Config& config, std::ostream& log) {
    fs::path dir = out_dir(config);
    std::string hash = config.hash();
    DetectionStrategy strategy = detection_strategy_from(config);
    DetectionConfig dc = detection_config_from(config);

    std::vector<BswCandidate> candidates;
    if (strategy == DetectionStrategy::Manual) {
        candidates = load_manual_list(config.require("manual_list"));
        for (const auto& c : candidates) {
            if (c.multiword) {
                log << "warning: multiword term '" << c.word
                    << "' will be skipped by unigram replacement\n";
            }
        }
    } else if (strategy == DetectionStrategy::Soac) {
        require_readable(config, "corpus");
        LabeledCorpus corpus = load_input_corpus(config);
        CorpusSplits splits =
            split_corpus(corpus, ratios_from(config), config.require_seed());
        candidates = detect_soac(build_vocabulary(splits.train), dc);
    } else {
        std::vector<std::string> words;
        if (auto wordlist = config.get("wordlist")) {
            auto set = load_word_set(*wordlist);
            words.assign(set.begin(), set.end());
        } else {
            require_readable(config, "corpus");
            LabeledCorpus corpus = load_input_corpus(config);
            CorpusSplits splits =
                split_corpus(corpus, ratios_from(config), config.require_seed());
            for (const auto& [word, stats] : build_vocabulary(splits.train)) {
                words.push_back(word);
            }
        }
        BackendHolder holder = make_backend(config);
        candidates = detect_spcpd(*holder.backend, words, dc);
    }

    std::string stem = "bsw_" + std::string(detection_strategy_name(strategy));
    write_candidates_json(candidates, (dir / (stem + ".json")).string(), hash);
    write_candidates_text(candidates, (dir / (stem + ".txt")).string(), hash);
    log << "candidates: " << candidates.size() << " -> "
        << (dir / (stem + ".json")).string() << "\n";
}

namespace {

struct PipelineRun {
    EvalReport report;
    DebiasedCorpus debiased;
    LinearModel model;
    std::vector<BswCandidate> candidates;
};

PipelineRun run_debias_pipeline(const Config& config, std::uint64_t run_seed,
                                const EmbeddingTable& base_table,
                                const WordNetDb* wordnet, const Taggers& taggers,
                                std::ostream& log) {
    LabeledCorpus corpus = load_input_corpus(config);
    CorpusSplits splits = split_corpus(corpus, ratios_from(config), run_seed);
    TrainConfig tc = train_config_from(config, run_seed);
    DetectionConfig dc = detection_config_from(config);
    DetectionStrategy detect_strategy = detection_strategy_from(config);

    PipelineRun run;
    if (detect_strategy == DetectionStrategy::Manual) {
        run.candidates = load_manual_list(config.require("manual_list"));
    } else if (detect_strategy == DetectionStrategy::Soac) {
        run.candidates = detect_soac(build_vocabulary(splits.train), dc);
    } else {
        LinearModel biased = train(splits.train, base_table, tc);
        LocalBackend backend(biased, base_table);
        std::vector<std::string> words;
        for (const auto& [word, stats] : build_vocabulary(splits.train)) {
            words.push_back(word);
        }
        run.candidates = detect_spcpd(backend, words, dc);
    }
    std::set<std::string> bsw = unigram_words(run.candidates, log);
    if (bsw.empty()) {
        throw DataError("detection produced no bias-sensitive words");
    }

    std::unordered_set<std::string> vocab;
    for (const auto& [word, stats] : build_vocabulary(splits.train)) {
        vocab.insert(word);
    }

    ReplacementStrategy strategy = strategy_from(config, run_seed);
    ReplacementResources res;
    res.pos_tagger = &pos_tagger_of(taggers);
    res.ne_tagger = taggers.ne.get();
    res.lexicon = taggers.builtin_pos.get();
    res.embeddings = &base_table;
    res.wordnet = wordnet;
    res.vocab = &vocab;

    run.debiased = apply_strategy(splits.train, bsw, strategy, res);

    EmbeddingTable table = base_table;
    for (const auto& [tag, vec] : run.debiased.injected_vectors) {
        table.inject(tag, vec);
    }
    run.model = train(run.debiased.corpus, table, tc);
    run.model.injected = run.debiased.injected_vectors;

    LabeledCorpus test = splits.test;
    if (config.get_bool("rewrite_eval", false)) {
        DebiasedCorpus rewritten = apply_strategy(test, bsw, strategy, res);
        for (const auto& [tag, vec] : rewritten.injected_vectors) {
            auto it = run.debiased.injected_vectors.find(tag);
            if (it == run.debiased.injected_vectors.end()) {
                table.inject(tag, vec);
            }
        }
        test = std::move(rewritten.corpus);
    }

    EvalReport& report = run.report;
    report.dataset = corpus.name;
    report.detection = detection_strategy_name(detect_strategy);
    report.replacement = strategy_label(strategy);
    report.roc_auc =
        roc_auc(score_tokens(run.model, table, test), corpus_labels(test));
    LocalBackend debiased_backend(run.model, table);
    auto probes = probe_words(debiased_backend, bsw);
    report.pb_mean = pb_from_probes(probes, PinnedVariant::Mean);
    report.pb_sym = pb_from_probes(probes, PinnedVariant::Sym);
    report.pb_asym = pb_from_probes(probes, PinnedVariant::Asym);
    report.per_word = std::move(probes);
    if (!test.annotations.empty()) {
        PaucResult p = pauc(debiased_backend, test, bsw, run_seed);
        report.pauc = p.value;
        report.skipped_bsws.insert(report.skipped_bsws.end(),
                                   p.skipped.begin(), p.skipped.end());
    }
    for (const auto& c : run.candidates) {
        if (c.multiword) report.skipped_bsws.push_back(c.word);
    }
    report.run_count = 1;
    report.seed = run_seed;
    report.config_hash = config.hash();
    report.timestamp = report_timestamp();
    return run;
}

}  // namespace

void cmd_debias(const Config& config, std::ostream& log) {
    require_readable(config, "corpus");
    require_readable(config, "embeddings");
    ReplacementStrategy strategy = strategy_from(config, 0);
    if (strategy.kind == ReplacementStrategy::Kind::WordNet) {
        if (!config.has("wordnet_dir")) {
            throw ConfigError("wordnet strategy requires 'wordnet_dir'");
        }
    }
    if (detection_strategy_from(config) == DetectionStrategy::Manual) {
        require_readable(config, "manual_list");
    }
    std::uint64_t seed = config.require_seed();
    int runs = static_cast<int>(config.get_int("runs", 1));
    if (runs < 1) throw ConfigError("runs must be >= 1");
    fs::path dir = out_dir(config);
    std::string hash = config.hash();

    EmbeddingTable base_table = embeddings_from(config);
    std::optional<WordNetDb> wordnet;
    if (strategy.kind == ReplacementStrategy::Kind::WordNet) {
        wordnet = load_wordnet(config.require("wordnet_dir"));
    }
    Taggers taggers = taggers_from(config);

    std::vector<EvalReport> reports;
    for (int r = 0; r < runs; ++r) {
        std::uint64_t run_seed = seed + static_cast<std::uint64_t>(r);
        PipelineRun run =
            run_debias_pipeline(config, run_seed, base_table,
                                wordnet ? &*wordnet : nullptr, taggers, log);
        if (r == 0) {
            CorpusFormat format = format_from(config);
            const char* ext = format == CorpusFormat::Csv ? ".csv" : ".tsv";
            write_corpus(run.debiased.corpus,
                         (dir / ("debiased_train" + std::string(ext))).string(),
                         format, "config_hash=" + hash);
            write_replacement_log(run.debiased,
                                  (dir / "replacement_log.json").string(), hash);
            save_model(run.model, (dir / "model.json").string(), hash);
            write_candidates_json(run.candidates, (dir / "bsw.json").string(),
                                  hash);
            write_candidates_text(run.candidates, (dir / "bsw.txt").string(),
                                  hash);
        }
        reports.push_back(std::move(run.report));
    }

    EvalReport final_report = aggregate_reports(reports);
    write_report(final_report, (dir / "report.json").string());
    log << "report: " << (dir / "report.json").string() << "\n";
    log << "roc_auc: " << final_report.roc_auc
        << " pb_sym: " << final_report.pb_sym
        << " pb_asym: " << final_report.pb_asym << "\n";
}

void cmd_eval(const Config& config, std::ostream& log) {
    require_readable(config, "corpus");
    std::uint64_t seed = config.require_seed();
    fs::path dir = out_dir(config);

    BackendHolder holder = make_backend(config);
    LabeledCorpus corpus = load_input_corpus(config);

    EvalReport report;
    report.dataset = corpus.name;
    report.detection = "none";
    report.replacement = "none";
    report.roc_auc =
        roc_auc(score_corpus(*holder.backend, corpus), corpus_labels(corpus));

    std::set<std::string> bsw;
    if (auto list = config.get("bsw_list")) bsw = load_word_set(*list);
    if (!bsw.empty()) {
        auto probes = probe_words(*holder.backend, bsw);
        report.pb_mean = pb_from_probes(probes, PinnedVariant::Mean);
        report.pb_sym = pb_from_probes(probes, PinnedVariant::Sym);
        report.pb_asym = pb_from_probes(probes, PinnedVariant::Asym);
        report.per_word = std::move(probes);
        if (!corpus.annotations.empty()) {
            PaucResult p = pauc(*holder.backend, corpus, bsw, seed);
            report.pauc = p.value;
            report.skipped_bsws = p.skipped;
        }
    }
    report.seed = seed;
    report.config_hash = config.hash();
    report.timestamp = report_timestamp();
    write_report(report, (dir / "eval_report.json").string());
    log << "report: " << (dir / "eval_report.json").string() << "\n";
    log << "roc_auc: " << report.roc_auc << "\n";
}

void cmd_madlibs(const Config& config, std::ostream& log) {
    require_readable(config, "madlibs_spec");
    std::uint64_t seed = config.require_seed();
    fs::path dir = out_dir(config);

    MadlibsSpec spec = load_madlibs_spec(config.require("madlibs_spec"));
    spec.target_size =
        static_cast<std::size_t>(config.get_int("madlibs_target", 1000));
    spec.seed = seed;

    LabeledCorpus corpus = generate_madlibs(spec);
    std::size_t hateful = 0;
    for (const auto& doc : corpus.documents) {
        hateful += doc.label == Label::Hateful;
    }
    fs::path path = dir / "madlibs.csv";
    write_corpus(corpus, path.string(), CorpusFormat::Csv,
                 "config_hash=" + config.hash());
    log << "generated " << corpus.documents.size() << " documents (" << hateful
        << " Hateful) -> " << path.string() << "\n";
}

void cmd_probe(const Config& config, std::ostream& log) {
    require_readable(config, "wordlist");
    fs::path dir = out_dir(config);
    std::string hash = config.hash();

    std::set<std::string> words = load_word_set(config.require("wordlist"));
    BackendHolder holder = make_backend(config);

    fs::path partial_path = dir / "probe_partial.jsonl";
    std::map<std::string, double> done;
    if (fs::exists(partial_path)) {
        std::ifstream in(partial_path, std::ios::binary);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                auto j = nlohmann::json::parse(line);
                done[j.at("word").get<std::string>()] =
                    j.at("p_hateful").get<double>();
            } catch (const nlohmann::json::exception&) {
                log << "warning: ignoring unparseable partial line\n";
            }
        }
        log << "resuming: " << done.size() << " words already probed\n";
    }

    std::ofstream partial(partial_path, std::ios::binary | std::ios::app);
    if (!partial) {
        throw DataError("cannot write partial file: " + partial_path.string());
    }
    for (const auto& word : words) {
        if (done.count(word)) continue;
        double p;
        try {
            p = holder.backend->predict(word).p_hateful;
        } catch (const TransportError&) {
            log << "probe interrupted; partial results in "
                << partial_path.string() << "\n";
            throw;
        }
        nlohmann::ordered_json line;
        line["word"] = word;
        line["p_hateful"] = p;
        partial << line.dump() << "\n" << std::flush;
        done[word] = p;
    }

    std::vector<std::pair<std::string, double>> ranked(done.begin(), done.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    nlohmann::ordered_json out;
    out["config_hash"] = hash;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [word, p] : ranked) {
        arr.push_back({{"word", word}, {"p_hateful", p}});
    }
    out["words"] = std::move(arr);
    fs::path ranked_path = dir / "probe_ranked.json";
    std::ofstream ranked_out(ranked_path, std::ios::binary);
    ranked_out << out.dump(2) << '\n';
    log << "probed " << done.size() << " words -> " << ranked_path.string()
        << "\n";
}

}  // namespace debias
