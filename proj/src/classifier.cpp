#include "debias/classifier.hpp"

#include <cmath>
#include <fstream>

#include "debias/det_rng.hpp"
#include "debias/errors.hpp"
#include "json.hpp"

namespace debias {

double sigmoid(double z) {
    if (z >= 0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

Vector featurize(const std::vector<std::string>& tokens,
                 const EmbeddingTable& table) {
    Vector mean(table.dim(), 0.0);
    std::size_t resolved = 0;
    for (const auto& t : tokens) {
        if (const Vector* v = table.lookup(t)) {
            for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += (*v)[i];
            ++resolved;
        }
    }
    if (resolved > 0) {
        for (double& c : mean) c /= static_cast<double>(resolved);
    }
    return mean;
}

namespace {

double affine(const Vector& weights, double bias, const Vector& x) {
    double z = bias;
    for (std::size_t i = 0; i < weights.size(); ++i) z += weights[i] * x[i];
    return z;
}

// log(1 + exp(-|z|)) stays finite for any z.
double log_loss_term(double z, int y) {
    return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

double logistic_loss(const std::vector<Vector>& features,
                     const std::vector<int>& labels, const Vector& weights,
                     double bias, double l2) {
    double total = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        total += log_loss_term(affine(weights, bias, features[i]), labels[i]);
    }
    total /= static_cast<double>(features.size());
    double reg = 0.0;
    for (double w : weights) reg += w * w;
    return total + 0.5 * l2 * reg;
}

void logistic_gradient(const std::vector<Vector>& features,
                       const std::vector<int>& labels, const Vector& weights,
                       double bias, double l2, Vector& grad_weights,
                       double& grad_bias) {
    grad_weights.assign(weights.size(), 0.0);
    grad_bias = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        double g = sigmoid(affine(weights, bias, features[i])) - labels[i];
        for (std::size_t j = 0; j < weights.size(); ++j) {
            grad_weights[j] += g * features[i][j];
        }
        grad_bias += g;
    }
    double n = static_cast<double>(features.size());
    for (std::size_t j = 0; j < weights.size(); ++j) {
        grad_weights[j] = grad_weights[j] / n + l2 * weights[j];
    }
    grad_bias /= n;
}

LinearModel train(const LabeledCorpus& corpus, const EmbeddingTable& table,
                  const TrainConfig& config) {
    if (config.epochs < 0 || config.batch_size < 1 ||
        config.learning_rate <= 0 || config.l2 < 0) {
        throw ConfigError("invalid training configuration");
    }

    std::vector<Vector> features;
    std::vector<int> labels;
    features.reserve(corpus.documents.size());
    int positives = 0, negatives = 0;
    for (const auto& doc : corpus.documents) {
        if (!doc.label) {
            throw DataError("unlabeled document " + doc.id +
                            " in training corpus");
        }
        features.push_back(featurize(doc.tokens, table));
        int y = *doc.label == Label::Hateful ? 1 : 0;
        labels.push_back(y);
        (y ? positives : negatives) += 1;
    }
    if (positives == 0 || negatives == 0) {
        throw DataError("training corpus '" + corpus.name +
                        "' contains a single class");
    }

    std::size_t n = features.size();
    LinearModel model;
    model.dim = table.dim();
    model.weights.assign(model.dim, 0.0);
    model.bias = 0.0;
    model.config = config;

    Vector grad(model.dim, 0.0);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        auto order = shuffled_indices(
            n, positional_draw(config.seed, fnv1a64("epoch"),
                               static_cast<std::uint64_t>(epoch)));
        for (std::size_t start = 0; start < n;
             start += static_cast<std::size_t>(config.batch_size)) {
            std::size_t end =
                std::min(n, start + static_cast<std::size_t>(config.batch_size));
            double batch = static_cast<double>(end - start);
            grad.assign(model.dim, 0.0);
            double grad_bias = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const Vector& x = features[order[k]];
                double g = sigmoid(affine(model.weights, model.bias, x)) -
                           labels[order[k]];
                for (std::size_t j = 0; j < model.dim; ++j) grad[j] += g * x[j];
                grad_bias += g;
            }
            for (std::size_t j = 0; j < model.dim; ++j) {
                model.weights[j] -= config.learning_rate *
                                    (grad[j] / batch + config.l2 * model.weights[j]);
            }
            model.bias -= config.learning_rate * grad_bias / batch;
        }
    }
    model.final_loss =
        logistic_loss(features, labels, model.weights, model.bias, config.l2);
    return model;
}

double LocalBackend::score(const Vector& features) const {
    return affine(model_.weights, model_.bias, features);
}

PredictionDistribution LocalBackend::predict(const std::string& text) {
    Vector x = featurize(tokenize(text), table_);
    double p = sigmoid(score(x));
    return PredictionDistribution{p, 1.0 - p};
}

void save_model(const LinearModel& model, const std::string& path,
                const std::string& config_hash) {
    nlohmann::ordered_json j;
    j["format"] = "debias-model";
    j["version"] = 1;
    j["config_hash"] = config_hash;
    j["dim"] = model.dim;
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    j["final_loss"] = model.final_loss;
    j["train_config"] = {{"learning_rate", model.config.learning_rate},
                         {"l2", model.config.l2},
                         {"epochs", model.config.epochs},
                         {"batch_size", model.config.batch_size},
                         {"seed", model.config.seed}};
    nlohmann::ordered_json injected = nlohmann::ordered_json::object();
    for (const auto& [tag, vec] : model.injected) injected[tag] = vec;
    j["injected"] = std::move(injected);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path);
    out << j.dump(2) << '\n';
}

LinearModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed model file " + path + ": " + e.what());
    }
    try {
        if (j.at("format") != "debias-model" || j.at("version") != 1) {
            throw DataError("unsupported model file format in " + path);
        }
        LinearModel model;
        model.dim = j.at("dim").get<std::size_t>();
        model.weights = j.at("weights").get<Vector>();
        model.bias = j.at("bias").get<double>();
        model.final_loss = j.at("final_loss").get<double>();
        const auto& tc = j.at("train_config");
        model.config.learning_rate = tc.at("learning_rate").get<double>();
        model.config.l2 = tc.at("l2").get<double>();
        model.config.epochs = tc.at("epochs").get<int>();
        model.config.batch_size = tc.at("batch_size").get<int>();
        model.config.seed = tc.at("seed").get<std::uint64_t>();
        for (const auto& [tag, vec] : j.at("injected").items()) {
            model.injected[tag] = vec.get<Vector>();
        }
        if (model.weights.size() != model.dim) {
            throw DataError("model file " + path + " has " +
                            std::to_string(model.weights.size()) +
                            " weights for dim " + std::to_string(model.dim));
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed model file " + path + ": " + e.what());
    }
}

}  // namespace debias
