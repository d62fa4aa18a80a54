#include <algorithm>
#include <cmath>

#include "models_internal.hpp"

namespace barriers {

namespace detail {

namespace {

constexpr double kProbEps = 1e-12;

struct NetConfig {
    MlpActivation activation = MlpActivation::relu;
    MlpLoss loss = MlpLoss::automatic;
};

std::size_t layer_inputs(const MlpModel& m, std::size_t l) {
    return l == 0 ? m.n_features : static_cast<std::size_t>(m.hidden_units);
}

std::size_t layer_outputs(const MlpModel& m, std::size_t l) {
    return l + 1 == m.weights.size() ? (m.sigmoid_output ? 1 : m.n_classes)
                                     : static_cast<std::size_t>(m.hidden_units);
}

// Layer sizes are [n_features, H, ..., H, n_outputs]. Two classes get a single
// sigmoid unit trained with binary cross-entropy; more get a softmax trained
// with categorical cross-entropy.
MlpModel make_model(std::size_t n_features, std::size_t n_classes, const MlpHyperparams& hp,
                    const NetConfig& config) {
    MlpModel m;
    m.n_features = n_features;
    m.n_classes = n_classes;
    m.hidden_layers = hp.hidden_layers;
    m.hidden_units = hp.hidden_units;
    m.sigmoid_output = n_classes == 2 && config.loss == MlpLoss::automatic;

    const std::size_t layers = static_cast<std::size_t>(hp.hidden_layers) + 1;
    m.weights.resize(layers);
    m.biases.resize(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        m.weights[l].assign(layer_inputs(m, l) * layer_outputs(m, l), 0.0);
        m.biases[l].assign(layer_outputs(m, l), 0.0);
    }
    return m;
}

void init_weights(MlpModel& m, Rng& rng) {
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        const double fan_in = static_cast<double>(layer_inputs(m, l));
        const bool hidden = l + 1 < m.weights.size();
        // He initialization for the ReLU layers, Xavier for the output.
        const double stddev = std::sqrt((hidden ? 2.0 : 1.0) / fan_in);
        for (double& w : m.weights[l]) w = stddev * rng.normal();
    }
}

struct ForwardState {
    std::vector<std::vector<double>> pre;   // per layer, before activation
    std::vector<std::vector<double>> post;  // per layer, after activation (and mask)
    std::vector<std::vector<double>> masks; // inverted-dropout scale per hidden unit
};

// One forward pass. When `rng` is set, hidden activations are put through an
// inverted-dropout mask (0 with probability `dropout`, else 1/keep) and the
// scales are recorded for backprop.
void forward_pass(const MlpModel& m, const NetConfig& config, const std::vector<double>& input,
                  ForwardState& state, Rng* rng = nullptr, double dropout = 0.0) {
    const std::size_t layers = m.weights.size();
    state.pre.resize(layers);
    state.post.resize(layers);
    state.masks.assign(layers, {});

    const std::vector<double>* current = &input;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = layer_inputs(m, l);
        const std::size_t out = layer_outputs(m, l);
        std::vector<double>& z = state.pre[l];
        z.assign(m.biases[l].begin(), m.biases[l].end());
        const std::vector<double>& w = m.weights[l];
        for (std::size_t i = 0; i < in; ++i) {
            const double x = (*current)[i];
            if (x == 0.0) continue;
            const double* row = w.data() + i * out;
            for (std::size_t o = 0; o < out; ++o) z[o] += x * row[o];
        }
        std::vector<double>& a = state.post[l];
        a = z;
        if (l + 1 < layers) {
            if (config.activation == MlpActivation::relu)
                for (double& v : a) v = std::max(0.0, v);
            if (rng && dropout > 0.0) {
                const double keep = 1.0 - dropout;
                std::vector<double>& mask = state.masks[l];
                mask.resize(out);
                for (std::size_t o = 0; o < out; ++o) {
                    mask[o] = rng->uniform() < dropout ? 0.0 : 1.0 / keep;
                    a[o] *= mask[o];
                }
            }
        } else if (config.loss == MlpLoss::automatic) {
            if (m.sigmoid_output)
                a[0] = 1.0 / (1.0 + std::exp(-z[0]));
            else
                softmax_inplace(a);
        }
        current = &a;
    }
}

double row_loss(const MlpModel& m, const NetConfig& config, const std::vector<double>& output,
                std::size_t label) {
    if (config.loss == MlpLoss::squared_error) {
        double sum = 0.0;
        for (std::size_t o = 0; o < output.size(); ++o) {
            const double target = o == label ? 1.0 : 0.0;
            sum += 0.5 * (output[o] - target) * (output[o] - target);
        }
        return sum;
    }
    if (m.sigmoid_output) {
        const double p = std::clamp(output[0], kProbEps, 1.0 - kProbEps);
        const double y = label == 1 ? 1.0 : 0.0;
        return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
    return -std::log(std::clamp(output[label], kProbEps, 1.0));
}

// dL/dz at the output layer. Sigmoid+BCE and softmax+CCE both collapse to
// (p - y); squared error on an identity output gives (a - y).
std::vector<double> output_delta(const MlpModel& m, const NetConfig& config,
                                 const std::vector<double>& output, std::size_t label) {
    std::vector<double> delta(output.size());
    if (config.loss == MlpLoss::squared_error) {
        for (std::size_t o = 0; o < output.size(); ++o)
            delta[o] = output[o] - (o == label ? 1.0 : 0.0);
    } else if (m.sigmoid_output) {
        delta[0] = output[0] - (label == 1 ? 1.0 : 0.0);
    } else {
        for (std::size_t o = 0; o < output.size(); ++o)
            delta[o] = output[o] - (o == label ? 1.0 : 0.0);
    }
    return delta;
}

struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    explicit Gradients(const MlpModel& m) {
        weights.resize(m.weights.size());
        biases.resize(m.biases.size());
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            weights[l].assign(m.weights[l].size(), 0.0);
            biases[l].assign(m.biases[l].size(), 0.0);
        }
    }

    void scale(double factor) {
        for (auto& layer : weights)
            for (double& g : layer) g *= factor;
        for (auto& layer : biases)
            for (double& g : layer) g *= factor;
    }
};

// Backpropagates one row into the accumulators, honouring any dropout masks
// recorded during the forward pass.
void accumulate_gradients(const MlpModel& m, const NetConfig& config,
                          const std::vector<double>& input, const ForwardState& state,
                          std::size_t label, Gradients& grads) {
    const std::size_t layers = m.weights.size();
    std::vector<double> delta = output_delta(m, config, state.post[layers - 1], label);

    for (std::size_t l = layers; l-- > 0;) {
        const std::size_t in = layer_inputs(m, l);
        const std::size_t out = layer_outputs(m, l);
        const std::vector<double>& below = l == 0 ? input : state.post[l - 1];

        for (std::size_t o = 0; o < out; ++o) grads.biases[l][o] += delta[o];
        for (std::size_t i = 0; i < in; ++i) {
            const double x = below[i];
            if (x == 0.0) continue;
            double* row = grads.weights[l].data() + i * out;
            for (std::size_t o = 0; o < out; ++o) row[o] += x * delta[o];
        }
        if (l == 0) break;

        std::vector<double> next(in, 0.0);
        const std::vector<double>& w = m.weights[l];
        const std::vector<double>& mask = state.masks[l - 1];
        for (std::size_t i = 0; i < in; ++i) {
            const double* row = w.data() + i * out;
            double sum = 0.0;
            for (std::size_t o = 0; o < out; ++o) sum += row[o] * delta[o];
            if (!mask.empty()) sum *= mask[i];
            if (config.activation == MlpActivation::relu && state.pre[l - 1][i] <= 0.0)
                sum = 0.0;
            next[i] = sum;
        }
        delta = std::move(next);
    }
}

double full_loss(const MlpModel& m, const NetConfig& config, const FeatureMatrix& data) {
    double total = 0.0;
    ForwardState state;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        const std::vector<double> input = densify(data.rows[i], m.n_features);
        forward_pass(m, config, input, state);
        total += row_loss(m, config, state.post.back(), data.labels[i]);
    }
    return total / static_cast<double>(data.rows.size());
}

struct AdamState {
    std::vector<std::vector<double>> m_weights, v_weights, m_biases, v_biases;
    std::int64_t step = 0;

    explicit AdamState(const MlpModel& m) {
        auto zero_like = [](const std::vector<std::vector<double>>& src) {
            std::vector<std::vector<double>> out(src.size());
            for (std::size_t i = 0; i < src.size(); ++i) out[i].assign(src[i].size(), 0.0);
            return out;
        };
        m_weights = zero_like(m.weights);
        v_weights = zero_like(m.weights);
        m_biases = zero_like(m.biases);
        v_biases = zero_like(m.biases);
    }
};

void adam_update(MlpModel& m, const Gradients& grads, AdamState& adam, const AdamConfig& cfg) {
    ++adam.step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam.step));
    auto update = [&](std::vector<double>& params, const std::vector<double>& g,
                      std::vector<double>& mm, std::vector<double>& vv) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            mm[i] = cfg.beta1 * mm[i] + (1.0 - cfg.beta1) * g[i];
            vv[i] = cfg.beta2 * vv[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            params[i] -= cfg.learning_rate * (mm[i] / bc1) / (std::sqrt(vv[i] / bc2) + cfg.epsilon);
        }
    };
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        update(m.weights[l], grads.weights[l], adam.m_weights[l], adam.v_weights[l]);
        update(m.biases[l], grads.biases[l], adam.m_biases[l], adam.v_biases[l]);
    }
}

} // namespace

TrainedModel train_mlp(const FeatureMatrix& data, const Hyperparams& hp) {
    const NetConfig config;
    MlpModel net = make_model(data.n_features, data.class_names.size(), hp.mlp, config);
    Rng rng(hp.seed);
    init_weights(net, rng);

    AdamState adam(net);
    TrainingMeta meta;
    meta.seed = hp.seed;

    ForwardState state;
    for (int epoch = 0; epoch < hp.mlp.epochs; ++epoch) {
        for (const auto& batch : make_batches(data.rows.size(), hp.mlp.batch_size, rng)) {
            Gradients grads(net);
            for (std::size_t i : batch) {
                const std::vector<double> input = densify(data.rows[i], net.n_features);
                forward_pass(net, config, input, state, &rng, hp.mlp.dropout);
                accumulate_gradients(net, config, input, state, data.labels[i], grads);
            }
            grads.scale(1.0 / static_cast<double>(batch.size()));
            adam_update(net, grads, adam, hp.mlp.adam);
        }
        const double loss = full_loss(net, config, data); // dropout off for reporting
        if (!std::isfinite(loss)) throw TrainingDivergedError("mlp", epoch);
        meta.epoch_losses.push_back(loss);
    }
    meta.epochs_run = hp.mlp.epochs;
    meta.final_loss = meta.epoch_losses.empty() ? 0.0 : meta.epoch_losses.back();

    TrainedModel model;
    model.kind = ModelKind::mlp;
    model.class_names = data.class_names;
    model.meta = std::move(meta);
    model.params = std::move(net);
    return model;
}

} // namespace detail

std::vector<double> mlp_forward(const MlpModel& model, const SparseVector& row) {
    detail::ForwardState state;
    detail::forward_pass(model, {}, detail::densify(row, model.n_features), state);
    return state.post.back();
}

std::vector<double> mlp_output_bias_gradient(const MlpModel& model, const FeatureMatrix& data) {
    detail::Gradients grads(model);
    detail::ForwardState state;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        const std::vector<double> input = detail::densify(data.rows[i], model.n_features);
        detail::forward_pass(model, {}, input, state);
        detail::accumulate_gradients(model, {}, input, state, data.labels[i], grads);
    }
    std::vector<double> out = grads.biases.back();
    for (double& g : out) g /= static_cast<double>(data.rows.size());
    return out;
}

double gradient_check(const MlpHyperparams& hp, const FeatureMatrix& probe, double epsilon,
                      const GradientCheckOptions& options) {
    detail::check_training_data(probe);
    const detail::NetConfig config{options.activation, options.loss};
    MlpModel net = detail::make_model(probe.n_features, probe.class_names.size(), hp, config);
    Rng rng(1);
    detail::init_weights(net, rng);

    // Analytic gradient of the full-batch mean loss; dropout plays no part.
    detail::Gradients analytic(net);
    detail::ForwardState state;
    for (std::size_t i = 0; i < probe.rows.size(); ++i) {
        const std::vector<double> input = detail::densify(probe.rows[i], net.n_features);
        detail::forward_pass(net, config, input, state);
        detail::accumulate_gradients(net, config, input, state, probe.labels[i], analytic);
    }
    analytic.scale(1.0 / static_cast<double>(probe.rows.size()));

    double max_rel = 0.0;
    auto check_parameter = [&](double& parameter, double analytic_grad) {
        const double saved = parameter;
        parameter = saved + epsilon;
        const double up = detail::full_loss(net, config, probe);
        parameter = saved - epsilon;
        const double down = detail::full_loss(net, config, probe);
        parameter = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        const double scale = std::max(1e-8, std::abs(analytic_grad) + std::abs(numeric));
        max_rel = std::max(max_rel, std::abs(analytic_grad - numeric) / scale);
    };
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (std::size_t j = 0; j < net.weights[l].size(); ++j)
            check_parameter(net.weights[l][j], analytic.weights[l][j]);
        for (std::size_t j = 0; j < net.biases[l].size(); ++j)
            check_parameter(net.biases[l][j], analytic.biases[l][j]);
    }
    return max_rel;
}

} // namespace barriers
