#include <algorithm>
#include <cmath>

#include "models_internal.hpp"

namespace barriers::detail {

namespace {

struct SplitCandidate {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double weighted_gini = 0.0;
};

double gini(std::span<const std::size_t> counts, std::size_t total) {
    if (total == 0) return 0.0;
    double sum_sq = 0.0;
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

std::size_t majority_label(std::span<const std::size_t> counts) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c)
        if (counts[c] > counts[best]) best = c;
    return best;
}

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& data, const TreeHyperparams& hp)
        : data_(data), hp_(hp), n_classes_(data.class_names.size()) {
        // Column-major dense copy; per-feature scans dominate the build.
        columns_.assign(data.n_features, std::vector<double>(data.rows.size(), 0.0));
        for (std::size_t r = 0; r < data.rows.size(); ++r)
            for (const SparseEntry& e : data.rows[r]) columns_[e.index][r] = e.value;
    }

    TreeModel build() {
        TreeModel model;
        model.n_features = data_.n_features;
        model.n_classes = n_classes_;
        std::vector<std::size_t> all(data_.rows.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        grow(model, all, 0);
        return model;
    }

private:
    std::vector<std::size_t> class_counts(std::span<const std::size_t> rows) const {
        std::vector<std::size_t> counts(n_classes_, 0);
        for (std::size_t r : rows) ++counts[data_.labels[r]];
        return counts;
    }

    // Best (feature, threshold) by weighted gini; exact ties resolve to the
    // lowest feature index, then the lowest threshold, by scan order.
    SplitCandidate best_split(std::span<const std::size_t> rows) const {
        SplitCandidate best;
        const std::size_t n = rows.size();
        std::vector<std::pair<double, std::size_t>> values(n); // value, label
        std::vector<std::size_t> left_counts(n_classes_);
        for (std::size_t f = 0; f < data_.n_features; ++f) {
            const std::vector<double>& column = columns_[f];
            for (std::size_t i = 0; i < n; ++i)
                values[i] = {column[rows[i]], data_.labels[rows[i]]};
            std::sort(values.begin(), values.end());
            if (values.front().first == values.back().first) continue;

            std::fill(left_counts.begin(), left_counts.end(), 0);
            std::size_t left_total = 0;
            std::vector<std::size_t> right_counts = class_counts(rows);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                ++left_counts[values[i].second];
                --right_counts[values[i].second];
                ++left_total;
                if (values[i].first == values[i + 1].first) continue;
                const double threshold = 0.5 * (values[i].first + values[i + 1].first);
                const std::size_t right_total = n - left_total;
                const double weighted =
                    (static_cast<double>(left_total) * gini(left_counts, left_total) +
                     static_cast<double>(right_total) * gini(right_counts, right_total)) /
                    static_cast<double>(n);
                if (!best.found || weighted < best.weighted_gini - 1e-12) {
                    best = {true, f, threshold, weighted};
                }
            }
        }
        return best;
    }

    std::int32_t grow(TreeModel& model, std::span<const std::size_t> rows, int depth) {
        const std::int32_t id = static_cast<std::int32_t>(model.nodes.size());
        model.nodes.emplace_back();

        const std::vector<std::size_t> counts = class_counts(rows);
        const double node_gini = gini(counts, rows.size());
        const std::size_t label = majority_label(counts);

        const bool stop = depth >= hp_.max_depth ||
                          rows.size() < static_cast<std::size_t>(hp_.min_samples_split) ||
                          node_gini == 0.0;
        SplitCandidate split;
        if (!stop) split = best_split(rows);
        if (stop || !split.found || split.weighted_gini >= node_gini - 1e-12) {
            model.nodes[id] = {true, 0, 0.0, -1, -1, label};
            return id;
        }

        std::vector<std::size_t> left_rows;
        std::vector<std::size_t> right_rows;
        for (std::size_t r : rows) {
            if (columns_[split.feature][r] <= split.threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        const std::int32_t left = grow(model, left_rows, depth + 1);
        const std::int32_t right = grow(model, right_rows, depth + 1);
        model.nodes[id] = {false, split.feature, split.threshold, left, right, label};
        return id;
    }

    const FeatureMatrix& data_;
    const TreeHyperparams& hp_;
    std::size_t n_classes_;
    std::vector<std::vector<double>> columns_;
};

} // namespace

TrainedModel train_decision_tree(const FeatureMatrix& data, const Hyperparams& hp) {
    TreeBuilder builder(data, hp.tree);

    TrainedModel model;
    model.kind = ModelKind::decision_tree;
    model.class_names = data.class_names;
    model.meta.seed = hp.seed;
    model.params = builder.build();
    return model;
}

std::size_t tree_predict(const TreeModel& model, const SparseVector& row) {
    std::int32_t node = 0;
    while (!model.nodes[static_cast<std::size_t>(node)].leaf) {
        const TreeNode& n = model.nodes[static_cast<std::size_t>(node)];
        double value = 0.0;
        for (const SparseEntry& e : row)
            if (e.index == n.feature) {
                value = e.value;
                break;
            }
        node = value <= n.threshold ? n.left : n.right;
    }
    return model.nodes[static_cast<std::size_t>(node)].label;
}

} // namespace barriers::detail
