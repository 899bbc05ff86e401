#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "debias/corpus.hpp"
#include "debias/embeddings.hpp"

namespace debias {

struct TrainConfig {
    double learning_rate = 0.1;
    double l2 = 1e-4;
    int epochs = 100;
    int batch_size = 32;
    std::uint64_t seed = 0;
};

struct LinearModel {
    std::size_t dim = 0;
    Vector weights;
    double bias = 0.0;
    TrainConfig config;
    double final_loss = 0.0;
    // Dummy-tag vectors the model was trained with, so a saved model can
    // rebuild its embedding view.
    std::map<std::string, Vector> injected;
};

struct PredictionDistribution {
    double p_hateful = 0.5;
    double p_neutral = 0.5;
};

double sigmoid(double z);

// Mean of the vectors of resolvable tokens; zero vector if none resolve.
Vector featurize(const std::vector<std::string>& tokens,
                 const EmbeddingTable& table);

double logistic_loss(const std::vector<Vector>& features,
                     const std::vector<int>& labels, const Vector& weights,
                     double bias, double l2);

void logistic_gradient(const std::vector<Vector>& features,
                       const std::vector<int>& labels, const Vector& weights,
                       double bias, double l2, Vector& grad_weights,
                       double& grad_bias);

LinearModel train(const LabeledCorpus& corpus, const EmbeddingTable& table,
                  const TrainConfig& config);

class ClassifierBackend {
public:
    virtual ~ClassifierBackend() = default;
    virtual PredictionDistribution predict(const std::string& text) = 0;
};

class LocalBackend : public ClassifierBackend {
public:
    // Injected tags from the model must already be present in `table`.
    LocalBackend(const LinearModel& model, const EmbeddingTable& table)
        : model_(model), table_(table) {}

    PredictionDistribution predict(const std::string& text) override;
    double score(const Vector& features) const;

private:
    const LinearModel& model_;
    const EmbeddingTable& table_;
};

void save_model(const LinearModel& model, const std::string& path,
                const std::string& config_hash);
LinearModel load_model(const std::string& path);

}  // namespace debias
