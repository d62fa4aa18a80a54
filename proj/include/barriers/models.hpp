#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "barriers/common.hpp"
#include "barriers/features.hpp"

namespace barriers {

enum class ModelKind { logreg, naive_bayes, linear_svc, knn, decision_tree, mlp };

std::string_view model_kind_name(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct MlpHyperparams {
    int hidden_layers = 3;
    int hidden_units = 64;
    int epochs = 10;
    int batch_size = 64;
    double dropout = 0.001; // applied during training only
    AdamConfig adam;
};

// Shared by logreg (softmax + cross-entropy) and linear SVC (one-vs-rest
// hinge); both are minimized by seeded mini-batch (sub)gradient descent.
struct LinearHyperparams {
    double l2 = 1e-4;
    int epochs = 100;
    double learning_rate = 0.5;
    int batch_size = 64;
};

struct KnnHyperparams {
    int k = 5; // cosine distance
};

struct TreeHyperparams {
    int max_depth = 20;
    int min_samples_split = 2;
};

struct NaiveBayesHyperparams {
    double alpha = 1.0; // Laplace smoothing
};

struct Hyperparams {
    MlpHyperparams mlp;
    LinearHyperparams logreg;
    LinearHyperparams svc;
    KnnHyperparams knn;
    TreeHyperparams tree;
    NaiveBayesHyperparams nb;
    std::uint64_t seed = 7;

    void validate() const; // throws ValidationError on nonsense values
};

// Learned parameters are plain data so tests and the serializer can reach in.

struct LinearModel {
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    bool softmax = false;                // logreg scores are softmax logits
    std::vector<double> weights;         // [class][feature], row-major
    std::vector<double> bias;            // [class]
};

struct NaiveBayesModel {
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    std::vector<double> log_prior;       // [class]
    std::vector<double> log_likelihood;  // [class][feature], row-major
};

struct KnnModel {
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    int k = 5;
    std::vector<SparseVector> rows;
    std::vector<std::size_t> labels;
    std::vector<double> norms;
};

struct TreeNode {
    bool leaf = true;
    std::size_t feature = 0;
    double threshold = 0.0; // go left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::size_t label = 0;
};

struct TreeModel {
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    std::vector<TreeNode> nodes; // nodes[0] is the root
};

struct MlpModel {
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    int hidden_layers = 3;
    int hidden_units = 64;
    bool sigmoid_output = true;              // 2 classes; softmax otherwise
    std::vector<std::vector<double>> weights; // per layer, [in][out] row-major
    std::vector<std::vector<double>> biases;  // per layer
};

struct TrainingMeta {
    std::uint64_t seed = 0;
    int epochs_run = 0;
    double final_loss = 0.0;
    std::vector<double> epoch_losses; // full-dataset objective after each epoch
    std::string notes;
};

struct TrainedModel {
    ModelKind kind = ModelKind::logreg;
    std::vector<std::string> class_names;
    TrainingMeta meta;
    std::variant<LinearModel, NaiveBayesModel, KnnModel, TreeModel, MlpModel> params;

    std::size_t n_features() const;
    std::size_t n_classes() const;
};

class TrainingDivergedError : public ValidationError {
public:
    TrainingDivergedError(std::string_view kind, int epoch)
        : ValidationError(std::string(kind) + " training diverged at epoch " +
                          std::to_string(epoch)),
          epoch(epoch) {}
    int epoch;
};

TrainedModel train(ModelKind kind, const FeatureMatrix& data, const Hyperparams& hp);

// One label per row; probability models break ties toward the lower class id.
// Rows may be narrower than the model (missing trailing features are zero)
// but never wider.
std::vector<std::size_t> predict(const TrainedModel& model,
                                 std::span<const SparseVector> rows); // OpenMP
std::vector<std::size_t> predict_serial(const TrainedModel& model,
                                        std::span<const SparseVector> rows);

// Class probabilities for logreg, naive bayes, and the mlp.
std::vector<std::vector<double>> predict_proba(const TrainedModel& model,
                                               std::span<const SparseVector> rows);

// Test hooks for the network internals: activation/loss combinations beyond
// the defaults exist for verification probes.
enum class MlpActivation { relu, identity };
enum class MlpLoss { automatic, squared_error };

struct GradientCheckOptions {
    MlpActivation activation = MlpActivation::relu;
    MlpLoss loss = MlpLoss::automatic;
};

// Max relative error between analytic and central-difference gradients of the
// full-batch loss, over every parameter. Dropout is disabled for the check.
double gradient_check(const MlpHyperparams& hp, const FeatureMatrix& probe, double epsilon,
                      const GradientCheckOptions& options = {});

// Output-layer bias gradient of the full-batch loss (the mean output delta),
// exposed for verification against hand-computed error terms.
std::vector<double> mlp_output_bias_gradient(const MlpModel& model,
                                             const FeatureMatrix& data);

// Forward pass of a stored network; exposed so tests can evaluate
// hand-constructed parameter sets.
std::vector<double> mlp_forward(const MlpModel& model, const SparseVector& row);

// Self-describing binary container; round-trips are bit-exact.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

} // namespace barriers
