#include "barriers/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "barriers/rng.hpp"
#include "models_internal.hpp"

namespace barriers {

std::string_view model_kind_name(ModelKind kind) {
    switch (kind) {
    case ModelKind::logreg: return "logreg";
    case ModelKind::naive_bayes: return "naive-bayes";
    case ModelKind::linear_svc: return "linear-svc";
    case ModelKind::knn: return "knn";
    case ModelKind::decision_tree: return "decision-tree";
    case ModelKind::mlp: return "mlp";
    }
    return "";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
    static const ModelKind kinds[] = {ModelKind::logreg,        ModelKind::naive_bayes,
                                      ModelKind::linear_svc,    ModelKind::knn,
                                      ModelKind::decision_tree, ModelKind::mlp};
    for (ModelKind kind : kinds)
        if (name == model_kind_name(kind)) return kind;
    return std::nullopt;
}

void Hyperparams::validate() const {
    auto positive = [](long v, const char* what) {
        if (v <= 0) throw ValidationError(std::string(what) + " must be positive");
    };
    positive(mlp.hidden_layers, "mlp.hidden_layers");
    positive(mlp.hidden_units, "mlp.hidden_units");
    positive(mlp.epochs, "mlp.epochs");
    positive(mlp.batch_size, "mlp.batch_size");
    positive(logreg.epochs, "logreg.epochs");
    positive(logreg.batch_size, "logreg.batch_size");
    positive(svc.epochs, "svc.epochs");
    positive(svc.batch_size, "svc.batch_size");
    positive(knn.k, "knn.k");
    positive(tree.max_depth, "tree.max_depth");
    positive(tree.min_samples_split, "tree.min_samples_split");
    if (mlp.dropout < 0.0 || mlp.dropout >= 1.0)
        throw ValidationError("mlp.dropout must lie in [0, 1)");
    if (logreg.l2 < 0.0 || svc.l2 < 0.0)
        throw ValidationError("l2 strength must be nonnegative");
    if (nb.alpha <= 0.0) throw ValidationError("nb.alpha must be positive");
}

std::size_t TrainedModel::n_features() const {
    return std::visit([](const auto& p) { return p.n_features; }, params);
}

std::size_t TrainedModel::n_classes() const {
    return std::visit([](const auto& p) { return p.n_classes; }, params);
}

namespace detail {

std::size_t argmax_low_tie(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return best;
}

void softmax_inplace(std::vector<double>& scores) {
    const double max = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double& s : scores) {
        s = std::exp(s - max);
        sum += s;
    }
    for (double& s : scores) s /= sum;
}

std::vector<double> densify(const SparseVector& row, std::size_t n_features) {
    std::vector<double> dense(n_features, 0.0);
    for (const SparseEntry& e : row) dense[e.index] = e.value;
    return dense;
}

void check_training_data(const FeatureMatrix& data) {
    if (data.rows.empty()) throw ValidationError("cannot train on an empty dataset");
    if (data.rows.size() != data.labels.size())
        throw ValidationError("row/label count mismatch");
    const std::size_t n_classes = data.class_names.size();
    if (n_classes < 2)
        throw ValidationError("training requires at least 2 classes, got " +
                              std::to_string(n_classes));
    std::vector<std::size_t> counts(n_classes, 0);
    for (std::size_t label : data.labels) {
        if (label >= n_classes)
            throw ValidationError("label id " + std::to_string(label) + " out of range");
        ++counts[label];
    }
    for (std::size_t c = 0; c < n_classes; ++c)
        if (counts[c] == 0)
            throw ValidationError("class \"" + data.class_names[c] + "\" has no rows");
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t n, int batch_size, Rng& rng) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);

    std::vector<std::vector<std::size_t>> batches;
    const auto step = static_cast<std::size_t>(batch_size);
    for (std::size_t start = 0; start < n; start += step) {
        const std::size_t end = std::min(n, start + step);
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return batches;
}

} // namespace detail

namespace {

using detail::argmax_low_tie;
using detail::check_training_data;
using detail::make_batches;
using detail::softmax_inplace;

double linear_score(const std::vector<double>& weights, std::size_t n_features,
                    std::size_t cls, const SparseVector& row) {
    const double* w = weights.data() + cls * n_features;
    double sum = 0.0;
    for (const SparseEntry& e : row) sum += w[e.index] * e.value;
    return sum;
}

std::vector<double> linear_scores(const LinearModel& m, const SparseVector& row) {
    std::vector<double> scores(m.n_classes);
    for (std::size_t c = 0; c < m.n_classes; ++c)
        scores[c] = linear_score(m.weights, m.n_features, c, row) + m.bias[c];
    return scores;
}

double l2_penalty(const std::vector<double>& weights, double lambda) {
    double sum = 0.0;
    for (double w : weights) sum += w * w;
    return 0.5 * lambda * sum;
}

// ---- softmax regression -------------------------------------------------

double logreg_objective(const LinearModel& m, const FeatureMatrix& data, double lambda) {
    double loss = 0.0;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        std::vector<double> scores = linear_scores(m, data.rows[i]);
        const double max = *std::max_element(scores.begin(), scores.end());
        double sum = 0.0;
        for (double s : scores) sum += std::exp(s - max);
        loss += -(scores[data.labels[i]] - max - std::log(sum));
    }
    return loss / static_cast<double>(data.rows.size()) + l2_penalty(m.weights, lambda);
}

TrainedModel train_logreg(const FeatureMatrix& data, const Hyperparams& hp) {
    const LinearHyperparams& lh = hp.logreg;
    LinearModel m;
    m.n_features = data.n_features;
    m.n_classes = data.class_names.size();
    m.softmax = true;
    m.weights.assign(m.n_classes * m.n_features, 0.0);
    m.bias.assign(m.n_classes, 0.0);

    Rng rng(hp.seed);
    TrainingMeta meta;
    meta.seed = hp.seed;

    std::vector<double> grad_w(m.weights.size());
    std::vector<double> grad_b(m.n_classes);
    for (int epoch = 0; epoch < lh.epochs; ++epoch) {
        for (const auto& batch : make_batches(data.rows.size(), lh.batch_size, rng)) {
            std::fill(grad_w.begin(), grad_w.end(), 0.0);
            std::fill(grad_b.begin(), grad_b.end(), 0.0);
            const double inv = 1.0 / static_cast<double>(batch.size());
            for (std::size_t i : batch) {
                std::vector<double> p = linear_scores(m, data.rows[i]);
                softmax_inplace(p);
                for (std::size_t c = 0; c < m.n_classes; ++c) {
                    const double g = (p[c] - (c == data.labels[i] ? 1.0 : 0.0)) * inv;
                    grad_b[c] += g;
                    double* gw = grad_w.data() + c * m.n_features;
                    for (const SparseEntry& e : data.rows[i]) gw[e.index] += g * e.value;
                }
            }
            for (std::size_t j = 0; j < m.weights.size(); ++j)
                m.weights[j] -= lh.learning_rate * (grad_w[j] + lh.l2 * m.weights[j]);
            for (std::size_t c = 0; c < m.n_classes; ++c)
                m.bias[c] -= lh.learning_rate * grad_b[c];
        }
        const double loss = logreg_objective(m, data, lh.l2);
        if (!std::isfinite(loss)) throw TrainingDivergedError("logreg", epoch);
        meta.epoch_losses.push_back(loss);
    }
    meta.epochs_run = lh.epochs;
    meta.final_loss = meta.epoch_losses.empty() ? 0.0 : meta.epoch_losses.back();

    TrainedModel model;
    model.kind = ModelKind::logreg;
    model.class_names = data.class_names;
    model.meta = std::move(meta);
    model.params = std::move(m);
    return model;
}

// ---- one-vs-rest linear SVC ----------------------------------------------

double svc_objective(const LinearModel& m, const FeatureMatrix& data, double lambda) {
    double total = 0.0;
    for (std::size_t c = 0; c < m.n_classes; ++c) {
        double hinge = 0.0;
        for (std::size_t i = 0; i < data.rows.size(); ++i) {
            const double y = data.labels[i] == c ? 1.0 : -1.0;
            const double margin =
                y * (linear_score(m.weights, m.n_features, c, data.rows[i]) + m.bias[c]);
            hinge += std::max(0.0, 1.0 - margin);
        }
        total += hinge / static_cast<double>(data.rows.size());
        double sum = 0.0;
        const double* w = m.weights.data() + c * m.n_features;
        for (std::size_t f = 0; f < m.n_features; ++f) sum += w[f] * w[f];
        total += 0.5 * lambda * sum;
    }
    return total;
}

TrainedModel train_svc(const FeatureMatrix& data, const Hyperparams& hp) {
    const LinearHyperparams& lh = hp.svc;
    LinearModel m;
    m.n_features = data.n_features;
    m.n_classes = data.class_names.size();
    m.softmax = false;
    m.weights.assign(m.n_classes * m.n_features, 0.0);
    m.bias.assign(m.n_classes, 0.0);

    Rng rng(hp.seed);
    TrainingMeta meta;
    meta.seed = hp.seed;

    for (int epoch = 0; epoch < lh.epochs; ++epoch) {
        for (const auto& batch : make_batches(data.rows.size(), lh.batch_size, rng)) {
            const double inv = 1.0 / static_cast<double>(batch.size());
            for (std::size_t c = 0; c < m.n_classes; ++c) {
                double* w = m.weights.data() + c * m.n_features;
                double grad_b = 0.0;
                std::vector<std::pair<std::size_t, double>> active; // row, y
                for (std::size_t i : batch) {
                    const double y = data.labels[i] == c ? 1.0 : -1.0;
                    const double margin =
                        y * (linear_score(m.weights, m.n_features, c, data.rows[i]) + m.bias[c]);
                    if (margin < 1.0) active.emplace_back(i, y);
                }
                // subgradient: -y x on violating rows, plus the L2 term
                for (std::size_t f = 0; f < m.n_features; ++f)
                    w[f] -= lh.learning_rate * lh.l2 * w[f];
                for (const auto& [i, y] : active) {
                    for (const SparseEntry& e : data.rows[i])
                        w[e.index] += lh.learning_rate * y * e.value * inv;
                    grad_b += -y * inv;
                }
                m.bias[c] -= lh.learning_rate * grad_b;
            }
        }
        const double loss = svc_objective(m, data, lh.l2);
        if (!std::isfinite(loss)) throw TrainingDivergedError("linear-svc", epoch);
        meta.epoch_losses.push_back(loss);
    }
    meta.epochs_run = lh.epochs;
    meta.final_loss = meta.epoch_losses.empty() ? 0.0 : meta.epoch_losses.back();

    TrainedModel model;
    model.kind = ModelKind::linear_svc;
    model.class_names = data.class_names;
    model.meta = std::move(meta);
    model.params = std::move(m);
    return model;
}

// ---- multinomial naive bayes ----------------------------------------------

TrainedModel train_naive_bayes(const FeatureMatrix& data, const Hyperparams& hp) {
    const double alpha = hp.nb.alpha;
    NaiveBayesModel m;
    m.n_features = data.n_features;
    m.n_classes = data.class_names.size();
    m.log_prior.assign(m.n_classes, 0.0);
    m.log_likelihood.assign(m.n_classes * m.n_features, 0.0);

    std::vector<double> class_counts(m.n_classes, 0.0);
    std::vector<double> feature_sums(m.n_classes * m.n_features, 0.0);
    std::vector<double> class_totals(m.n_classes, 0.0);
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        const std::size_t c = data.labels[i];
        class_counts[c] += 1.0;
        for (const SparseEntry& e : data.rows[i]) {
            feature_sums[c * m.n_features + e.index] += e.value;
            class_totals[c] += e.value;
        }
    }
    const double n = static_cast<double>(data.rows.size());
    for (std::size_t c = 0; c < m.n_classes; ++c) {
        m.log_prior[c] = std::log(class_counts[c] / n);
        const double denominator =
            class_totals[c] + alpha * static_cast<double>(m.n_features);
        for (std::size_t f = 0; f < m.n_features; ++f)
            m.log_likelihood[c * m.n_features + f] =
                std::log((feature_sums[c * m.n_features + f] + alpha) / denominator);
    }

    TrainedModel model;
    model.kind = ModelKind::naive_bayes;
    model.class_names = data.class_names;
    model.meta.seed = hp.seed;
    model.params = std::move(m);
    return model;
}

std::vector<double> nb_log_joint(const NaiveBayesModel& m, const SparseVector& row) {
    std::vector<double> scores(m.log_prior);
    for (const SparseEntry& e : row)
        for (std::size_t c = 0; c < m.n_classes; ++c)
            scores[c] += e.value * m.log_likelihood[c * m.n_features + e.index];
    return scores;
}

// ---- k nearest neighbours ---------------------------------------------------

TrainedModel train_knn(const FeatureMatrix& data, const Hyperparams& hp) {
    KnnModel m;
    m.n_features = data.n_features;
    m.n_classes = data.class_names.size();
    m.k = std::min<int>(hp.knn.k, static_cast<int>(data.rows.size()));
    m.rows = data.rows;
    m.labels = data.labels;
    m.norms.reserve(m.rows.size());
    for (const SparseVector& row : m.rows) m.norms.push_back(l2_norm(row));

    TrainedModel model;
    model.kind = ModelKind::knn;
    model.class_names = data.class_names;
    model.meta.seed = hp.seed;
    model.params = std::move(m);
    return model;
}

std::size_t knn_vote(const KnnModel& m, const SparseVector& row) {
    const double query_norm = l2_norm(row);
    std::vector<std::pair<double, std::size_t>> distances;
    distances.reserve(m.rows.size());
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        const double denominator = query_norm * m.norms[i];
        const double cosine = denominator > 0.0 ? dot(row, m.rows[i]) / denominator : 0.0;
        distances.emplace_back(1.0 - cosine, i);
    }
    const auto k = static_cast<std::size_t>(m.k);
    std::partial_sort(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(k),
                      distances.end());
    std::vector<std::size_t> votes(m.n_classes, 0);
    for (std::size_t i = 0; i < k; ++i) ++votes[m.labels[distances[i].second]];
    std::size_t best = 0;
    for (std::size_t c = 1; c < m.n_classes; ++c)
        if (votes[c] > votes[best]) best = c;
    return best;
}

} // namespace

// ---- dispatch ----------------------------------------------------------------

TrainedModel train(ModelKind kind, const FeatureMatrix& data, const Hyperparams& hp) {
    hp.validate();
    detail::check_training_data(data);
    switch (kind) {
    case ModelKind::logreg: return train_logreg(data, hp);
    case ModelKind::naive_bayes: return train_naive_bayes(data, hp);
    case ModelKind::linear_svc: return train_svc(data, hp);
    case ModelKind::knn: return train_knn(data, hp);
    case ModelKind::decision_tree: return detail::train_decision_tree(data, hp);
    case ModelKind::mlp: return detail::train_mlp(data, hp);
    }
    throw ContractViolation("unknown model kind");
}

namespace {

void check_row_widths(const TrainedModel& model, std::span<const SparseVector> rows) {
    const std::size_t width = model.n_features();
    for (const SparseVector& row : rows)
        for (const SparseEntry& e : row)
            if (e.index >= width)
                throw ValidationError("row has feature index " + std::to_string(e.index) +
                                      " but the model expects fewer than " +
                                      std::to_string(width));
}

std::size_t predict_row(const TrainedModel& model, const SparseVector& row) {
    switch (model.kind) {
    case ModelKind::logreg:
    case ModelKind::linear_svc: {
        const auto& m = std::get<LinearModel>(model.params);
        return argmax_low_tie(linear_scores(m, row));
    }
    case ModelKind::naive_bayes: {
        const auto& m = std::get<NaiveBayesModel>(model.params);
        return argmax_low_tie(nb_log_joint(m, row));
    }
    case ModelKind::knn: return knn_vote(std::get<KnnModel>(model.params), row);
    case ModelKind::decision_tree:
        return detail::tree_predict(std::get<TreeModel>(model.params), row);
    case ModelKind::mlp: {
        const auto& m = std::get<MlpModel>(model.params);
        const std::vector<double> out = mlp_forward(m, row);
        if (m.sigmoid_output) return out[0] > 0.5 ? 1 : 0;
        return argmax_low_tie(out);
    }
    }
    throw ContractViolation("unknown model kind");
}

std::vector<std::size_t> run_predict(const TrainedModel& model,
                                     std::span<const SparseVector> rows, bool parallel) {
    check_row_widths(model, rows);
    std::vector<std::size_t> labels(rows.size());
    const std::int64_t n = static_cast<std::int64_t>(rows.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < n; ++i) labels[i] = predict_row(model, rows[i]);
    return labels;
}

} // namespace

std::vector<std::size_t> predict(const TrainedModel& model,
                                 std::span<const SparseVector> rows) {
    return run_predict(model, rows, true);
}

std::vector<std::size_t> predict_serial(const TrainedModel& model,
                                        std::span<const SparseVector> rows) {
    return run_predict(model, rows, false);
}

std::vector<std::vector<double>> predict_proba(const TrainedModel& model,
                                               std::span<const SparseVector> rows) {
    check_row_widths(model, rows);
    std::vector<std::vector<double>> probabilities(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        switch (model.kind) {
        case ModelKind::logreg: {
            const auto& m = std::get<LinearModel>(model.params);
            std::vector<double> p = linear_scores(m, rows[i]);
            softmax_inplace(p);
            probabilities[i] = std::move(p);
            break;
        }
        case ModelKind::naive_bayes: {
            const auto& m = std::get<NaiveBayesModel>(model.params);
            std::vector<double> p = nb_log_joint(m, rows[i]);
            softmax_inplace(p);
            probabilities[i] = std::move(p);
            break;
        }
        case ModelKind::mlp: {
            const auto& m = std::get<MlpModel>(model.params);
            const std::vector<double> out = mlp_forward(m, rows[i]);
            if (m.sigmoid_output)
                probabilities[i] = {1.0 - out[0], out[0]};
            else
                probabilities[i] = out;
            break;
        }
        default:
            throw ContractViolation(std::string(model_kind_name(model.kind)) +
                                    " does not produce probabilities");
        }
    }
    return probabilities;
}

} // namespace barriers
