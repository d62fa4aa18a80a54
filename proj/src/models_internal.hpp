#pragma once

#include <span>
#include <vector>

#include "barriers/models.hpp"
#include "barriers/rng.hpp"

namespace barriers::detail {

std::size_t argmax_low_tie(std::span<const double> scores);
void softmax_inplace(std::vector<double>& scores);
std::vector<double> densify(const SparseVector& row, std::size_t n_features);
void check_training_data(const FeatureMatrix& data);
std::vector<std::vector<std::size_t>> make_batches(std::size_t n, int batch_size, Rng& rng);

TrainedModel train_decision_tree(const FeatureMatrix& data, const Hyperparams& hp);
std::size_t tree_predict(const TreeModel& model, const SparseVector& row);

TrainedModel train_mlp(const FeatureMatrix& data, const Hyperparams& hp);

} // namespace barriers::detail
