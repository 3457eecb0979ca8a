#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "textens/class_probabilities.hpp"
#include "textens/dataset.hpp"
#include "textens/errors.hpp"

namespace textens {

// Separating hyperplane w.x + b = 0; the sign of the margin classifies.
struct HyperplaneModel {
    std::vector<double> w;
    double b = 0.0;

    std::size_t dim() const { return w.size(); }
};

struct SvmHyperParams {
    double reg_lambda = 1e-3;
    double learning_rate = 0.1;  // decays as 1/sqrt(t)
    std::size_t iterations = 200;
    std::uint64_t seed = 42;  // echoed into archives; full-batch training is seedless
};

struct OvRModel {
    std::vector<HyperplaneModel> per_class;
    LabelSet label_set;
};

using SignedExample = std::pair<int, FeatureVector>;  // sign in {-1, +1}

inline double decision(const HyperplaneModel& model, const FeatureVector& x) {
    if (x.dim != model.dim()) throw DimensionMismatch(model.dim(), x.dim);
    double margin = model.b;
    for (const auto& [d, c] : x.entries)
        margin += model.w[d] * static_cast<double>(c);
    return margin;
}

namespace svm_detail {

struct HingeGrad {
    std::vector<double> gw;
    double gb = 0.0;

    static HingeGrad zero(std::size_t dim) {
        HingeGrad g;
        g.gw.assign(dim, 0.0);
        return g;
    }
};

}  // namespace svm_detail

// Full-batch subgradient descent on  lambda*|w|^2 + (1/N) sum hinge(y, w.x+b),
// from w = 0, b = 0. Per-example subgradients come from the partition engine
// and are combined in partition order, so training is deterministic for a
// fixed partition count.
inline HyperplaneModel train_binary_svm(const PartitionedDataset<SignedExample>& corpus,
                                        const SvmHyperParams& hp) {
    std::size_t n = corpus.total_len();
    if (n == 0) throw EmptyCorpus();
    if (hp.learning_rate <= 0.0 || hp.iterations < 1 || hp.reg_lambda < 0.0)
        throw InvalidParams("svm hyperparameters out of range");

    std::size_t dim = 0;
    bool first = true;
    bool seen_pos = false, seen_neg = false;
    for (const auto& part : corpus.partitions) {
        for (const auto& [sign, fv] : part) {
            if (sign != 1 && sign != -1) throw InvalidParams("labels must be +1/-1");
            (sign == 1 ? seen_pos : seen_neg) = true;
            if (first) {
                dim = fv.dim;
                first = false;
            } else if (fv.dim != dim) {
                throw DimensionMismatch(dim, fv.dim);
            }
        }
    }
    if (!seen_pos || !seen_neg) throw SingleClassCorpus();

    HyperplaneModel model;
    model.w.assign(dim, 0.0);
    model.b = 0.0;
    double inv_n = 1.0 / static_cast<double>(n);

    for (std::size_t t = 1; t <= hp.iterations; ++t) {
        auto grad = par_fold(
            corpus, svm_detail::HingeGrad::zero(dim),
            [&](svm_detail::HingeGrad acc, const SignedExample& ex) {
                const auto& [sign, fv] = ex;
                double y = static_cast<double>(sign);
                if (y * decision(model, fv) < 1.0) {
                    for (const auto& [d, c] : fv.entries)
                        acc.gw[d] -= y * static_cast<double>(c);
                    acc.gb -= y;
                }
                return acc;
            },
            [](svm_detail::HingeGrad a, svm_detail::HingeGrad b) {
                for (std::size_t i = 0; i < a.gw.size(); ++i) a.gw[i] += b.gw[i];
                a.gb += b.gb;
                return a;
            });

        double lr = hp.learning_rate / std::sqrt(static_cast<double>(t));
        for (std::size_t d = 0; d < dim; ++d)
            model.w[d] -= lr * (2.0 * hp.reg_lambda * model.w[d] + grad.gw[d] * inv_n);
        model.b -= lr * grad.gb * inv_n;
    }
    return model;
}

// Regularized hinge objective, shared by tests and the descent check.
inline double svm_objective(const HyperplaneModel& model,
                            const PartitionedDataset<SignedExample>& corpus,
                            double reg_lambda) {
    double norm_sq = 0.0;
    for (double w : model.w) norm_sq += w * w;
    double hinge = par_fold(
        corpus, 0.0,
        [&](double acc, const SignedExample& ex) {
            double margin = static_cast<double>(ex.first) * decision(model, ex.second);
            return acc + std::max(0.0, 1.0 - margin);
        },
        [](double a, double b) { return a + b; });
    return reg_lambda * norm_sq + hinge / static_cast<double>(corpus.total_len());
}

// One binary machine per class, class j against the rest.
inline OvRModel train_ovr(const VectorizedCorpus& corpus, const LabelSet& labels,
                          const SvmHyperParams& hp) {
    if (labels.size() < 2) throw SingleClassCorpus();
    corpus_dim(corpus);
    OvRModel model;
    model.label_set = labels;
    model.per_class.reserve(labels.size());
    for (std::size_t j = 0; j < labels.size(); ++j) {
        PartitionedDataset<SignedExample> relabeled;
        relabeled.partitions.resize(corpus.partition_count());
        for (std::size_t p = 0; p < corpus.partition_count(); ++p) {
            auto& dst = relabeled.partitions[p];
            dst.reserve(corpus.partitions[p].size());
            for (const auto& e : corpus.partitions[p])
                dst.emplace_back(e.label == j ? 1 : -1, e.features);
        }
        model.per_class.push_back(train_binary_svm(relabeled, hp));
    }
    return model;
}

// Hard one-hot on the largest margin, matching the reference score tables.
inline ClassProbabilities predict_ovr(const OvRModel& model, const FeatureVector& x) {
    std::size_t winner = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < model.per_class.size(); ++j) {
        double margin = decision(model.per_class[j], x);
        if (margin > best) {
            best = margin;
            winner = j;
        }
    }
    return ClassProbabilities::one_hot(model.per_class.size(), winner);
}

}  // namespace textens
