#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "textens/class_probabilities.hpp"
#include "textens/dataset.hpp"
#include "textens/errors.hpp"
#include "textens/rng.hpp"

namespace textens {

// Single-hidden-layer network: ELU hidden activation, softmax output.
// Parameters live in one flat vector [W1 | b1 | W2 | b2], which keeps Adam,
// replica averaging, and serialization trivial.
struct MLPModel {
    std::size_t dim = 0;
    std::size_t units = 0;
    std::size_t n_classes = 0;
    std::uint64_t seed = 0;
    std::vector<double> params;

    std::size_t w1_at(std::size_t u, std::size_t d) const { return u * dim + d; }
    std::size_t b1_off() const { return units * dim; }
    std::size_t w2_off() const { return b1_off() + units; }
    std::size_t w2_at(std::size_t c, std::size_t u) const { return w2_off() + c * units + u; }
    std::size_t b2_off() const { return w2_off() + n_classes * units; }
    std::size_t param_count() const { return b2_off() + n_classes; }
};

struct AdamParams {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;
    AdamParams hp;

    static AdamState fresh(std::size_t n, const AdamParams& hp) {
        AdamState s;
        s.m.assign(n, 0.0);
        s.v.assign(n, 0.0);
        s.t = 0;
        s.hp = hp;
        return s;
    }
};

struct TrainingMasterConfig {
    std::size_t worker_count = 1;
    std::size_t averaging_frequency = 5;
    std::size_t batch_size_per_worker = 32;
};

struct MlpTrainParams {
    std::size_t units = 128;
    std::size_t epochs = 1;
    AdamParams adam;
    TrainingMasterConfig master;
    std::uint64_t seed = 42;
};

// Weights uniform in +-1/sqrt(fan_in), biases zero.
inline MLPModel init_mlp(std::size_t dim, std::size_t units, std::size_t n_classes,
                         std::uint64_t seed) {
    if (dim < 1 || units < 1 || n_classes < 1)
        throw InvalidParams("network dimensions must be positive");
    MLPModel model;
    model.dim = dim;
    model.units = units;
    model.n_classes = n_classes;
    model.seed = seed;
    model.params.assign(model.param_count(), 0.0);
    SplitMix64 rng(seed);
    double s1 = 1.0 / std::sqrt(static_cast<double>(dim));
    for (std::size_t i = 0; i < units * dim; ++i)
        model.params[i] = rng.uniform(-s1, s1);
    double s2 = 1.0 / std::sqrt(static_cast<double>(units));
    for (std::size_t i = 0; i < n_classes * units; ++i)
        model.params[model.w2_off() + i] = rng.uniform(-s2, s2);
    return model;
}

inline double elu(double z) { return z >= 0.0 ? z : std::expm1(z); }

namespace mlp_detail {

struct ForwardTrace {
    std::vector<double> pre1;    // units
    std::vector<double> hidden;  // units, ELU(pre1)
    std::vector<double> logits;  // n_classes
    std::vector<double> probs;   // n_classes
    double log_prob_of(std::size_t cls) const { return std::log(probs[cls]); }
};

inline void forward_trace(const MLPModel& m, const FeatureVector& x, ForwardTrace& t) {
    t.pre1.assign(m.units, 0.0);
    for (const auto& [d, c] : x.entries) {
        double cv = static_cast<double>(c);
        for (std::size_t u = 0; u < m.units; ++u)
            t.pre1[u] += m.params[m.w1_at(u, d)] * cv;
    }
    t.hidden.resize(m.units);
    for (std::size_t u = 0; u < m.units; ++u) {
        t.pre1[u] += m.params[m.b1_off() + u];
        t.hidden[u] = elu(t.pre1[u]);
    }
    t.logits.assign(m.n_classes, 0.0);
    for (std::size_t c = 0; c < m.n_classes; ++c) {
        double z = m.params[m.b2_off() + c];
        for (std::size_t u = 0; u < m.units; ++u)
            z += m.params[m.w2_at(c, u)] * t.hidden[u];
        t.logits[c] = z;
    }
    double zmax = t.logits[0];
    for (double z : t.logits)
        if (z > zmax) zmax = z;
    t.probs.resize(m.n_classes);
    double sum = 0.0;
    for (std::size_t c = 0; c < m.n_classes; ++c) {
        t.probs[c] = std::exp(t.logits[c] - zmax);
        sum += t.probs[c];
    }
    for (double& p : t.probs) p /= sum;
}

}  // namespace mlp_detail

inline ClassProbabilities mlp_forward(const MLPModel& model, const FeatureVector& x) {
    if (x.dim != model.dim) throw DimensionMismatch(model.dim, x.dim);
    mlp_detail::ForwardTrace t;
    mlp_detail::forward_trace(model, x, t);
    return ClassProbabilities(std::move(t.probs));
}

// Mean categorical cross-entropy over the batch.
inline double mlp_loss(const MLPModel& model, std::span<const Example> batch) {
    if (batch.empty()) throw InvalidParams("empty batch");
    mlp_detail::ForwardTrace t;
    double loss = 0.0;
    for (const auto& e : batch) {
        if (e.features.dim != model.dim) throw DimensionMismatch(model.dim, e.features.dim);
        mlp_detail::forward_trace(model, e.features, t);
        double zmax = t.logits[0];
        for (double z : t.logits)
            if (z > zmax) zmax = z;
        double lse = 0.0;
        for (double z : t.logits) lse += std::exp(z - zmax);
        loss -= t.logits[e.label] - zmax - std::log(lse);
    }
    return loss / static_cast<double>(batch.size());
}

// Exact gradient of mlp_loss by backpropagation, flat layout as params.
inline std::vector<double> mlp_gradient(const MLPModel& model,
                                        std::span<const Example> batch) {
    if (batch.empty()) throw InvalidParams("empty batch");
    std::vector<double> grad(model.param_count(), 0.0);
    mlp_detail::ForwardTrace t;
    std::vector<double> dlogits(model.n_classes), dpre1(model.units);
    for (const auto& e : batch) {
        if (e.features.dim != model.dim) throw DimensionMismatch(model.dim, e.features.dim);
        mlp_detail::forward_trace(model, e.features, t);
        for (std::size_t c = 0; c < model.n_classes; ++c) dlogits[c] = t.probs[c];
        dlogits[e.label] -= 1.0;

        for (std::size_t c = 0; c < model.n_classes; ++c) {
            double dc = dlogits[c];
            for (std::size_t u = 0; u < model.units; ++u)
                grad[model.w2_at(c, u)] += dc * t.hidden[u];
            grad[model.b2_off() + c] += dc;
        }
        for (std::size_t u = 0; u < model.units; ++u) {
            double dh = 0.0;
            for (std::size_t c = 0; c < model.n_classes; ++c)
                dh += model.params[model.w2_at(c, u)] * dlogits[c];
            // ELU'(z) = 1 for z >= 0, e^z otherwise
            dpre1[u] = dh * (t.pre1[u] >= 0.0 ? 1.0 : std::exp(t.pre1[u]));
        }
        for (const auto& [d, c] : e.features.entries) {
            double cv = static_cast<double>(c);
            for (std::size_t u = 0; u < model.units; ++u)
                grad[model.w1_at(u, d)] += dpre1[u] * cv;
        }
        for (std::size_t u = 0; u < model.units; ++u)
            grad[model.b1_off() + u] += dpre1[u];
    }
    double inv_b = 1.0 / static_cast<double>(batch.size());
    for (double& g : grad) g *= inv_b;
    return grad;
}

// One bias-corrected Adam update on all parameters.
inline void train_step_adam(MLPModel& model, AdamState& adam,
                            std::span<const Example> batch) {
    auto grad = mlp_gradient(model, batch);
    adam.t += 1;
    const auto& hp = adam.hp;
    double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(adam.t));
    double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(adam.t));
    for (std::size_t i = 0; i < grad.size(); ++i) {
        adam.m[i] = hp.beta1 * adam.m[i] + (1.0 - hp.beta1) * grad[i];
        adam.v[i] = hp.beta2 * adam.v[i] + (1.0 - hp.beta2) * grad[i] * grad[i];
        double m_hat = adam.m[i] / bc1;
        double v_hat = adam.v[i] / bc2;
        model.params[i] -= hp.learning_rate * m_hat / (std::sqrt(v_hat) + hp.epsilon);
    }
}

// Runs the parameter-averaging rounds over explicit worker shards. Exposed
// separately from train_parameter_averaging so the averaging mechanics can
// be driven directly.
inline MLPModel parameter_averaging_rounds(const MLPModel& init,
                                           const std::vector<std::vector<Example>>& shards,
                                           const TrainingMasterConfig& cfg,
                                           const AdamParams& adam_hp) {
    std::size_t workers = shards.size();
    if (workers == 0) throw InvalidParams("no worker shards");
    if (cfg.averaging_frequency < 1 || cfg.batch_size_per_worker < 1)
        throw InvalidParams("averaging frequency and batch size must be >= 1");

    // worker batches: contiguous minibatches of batch_size (last may be short)
    std::vector<std::vector<std::span<const Example>>> batches(workers);
    std::size_t max_batches = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        const auto& shard = shards[w];
        for (std::size_t at = 0; at < shard.size(); at += cfg.batch_size_per_worker) {
            std::size_t len = std::min(cfg.batch_size_per_worker, shard.size() - at);
            batches[w].emplace_back(shard.data() + at, len);
        }
        max_batches = std::max(max_batches, batches[w].size());
    }

    std::vector<MLPModel> replicas(workers, init);
    std::vector<AdamState> states(
        workers, AdamState::fresh(init.param_count(), adam_hp));

    std::size_t rounds =
        (max_batches + cfg.averaging_frequency - 1) / cfg.averaging_frequency;
    for (std::size_t r = 0; r < rounds; ++r) {
        engine_detail::run_tasks(workers, [&](std::size_t w) {
            std::size_t from = r * cfg.averaging_frequency;
            std::size_t to = std::min(from + cfg.averaging_frequency, batches[w].size());
            for (std::size_t b = from; b < to; ++b)
                train_step_adam(replicas[w], states[w], batches[w][b]);
        });
        // averaging barrier: replicas take the element-wise parameter mean
        std::vector<double> mean(init.param_count(), 0.0);
        for (std::size_t w = 0; w < workers; ++w)
            for (std::size_t i = 0; i < mean.size(); ++i)
                mean[i] += replicas[w].params[i];
        // only parameters are replaced; each worker keeps its own moments
        for (double& p : mean) p /= static_cast<double>(workers);
        for (std::size_t w = 0; w < workers; ++w) replicas[w].params = mean;
    }
    return replicas[0];
}

// One epoch (by default) of data-parallel training: shuffle with the seed,
// split into contiguous worker shards, and average parameters after every
// averaging_frequency minibatches and at end of epoch.
inline MLPModel train_parameter_averaging(const VectorizedCorpus& corpus,
                                          const LabelSet& labels,
                                          const MlpTrainParams& params) {
    std::size_t dim = corpus_dim(corpus);
    if (params.master.worker_count < 1) throw InvalidParams("worker count must be >= 1");
    if (params.epochs < 1) throw InvalidParams("epochs must be >= 1");

    auto data = corpus.flatten();
    MLPModel model = init_mlp(dim, params.units, labels.size(), params.seed);
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        auto order = shuffled_indices(data.size(),
                                      SplitMix64::derived(params.seed, epoch).next());
        std::vector<Example> shuffled;
        shuffled.reserve(data.size());
        for (std::size_t i : order) shuffled.push_back(data[i]);
        auto shards = partition(std::move(shuffled), params.master.worker_count);
        model = parameter_averaging_rounds(model, shards.partitions, params.master,
                                           params.adam);
    }
    return model;
}

}  // namespace textens
