#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "textens/class_probabilities.hpp"
#include "textens/dataset.hpp"
#include "textens/errors.hpp"
#include "textens/rng.hpp"

namespace textens {

// CART-style tree stored as a node arena. Internal nodes route on
// x[feature] <= threshold; leaves carry a class ordinal.
struct TreeNode {
    bool leaf = true;
    std::uint32_t cls = 0;
    std::uint32_t feature = 0;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    std::size_t predict(const FeatureVector& x) const {
        std::int32_t at = 0;
        while (!nodes[at].leaf) {
            double v = static_cast<double>(x.value_at(nodes[at].feature));
            at = v <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
        }
        return nodes[at].cls;
    }
};

struct RfParams {
    std::size_t n_trees = 100;
    std::size_t feature_subset = 0;  // 0 = ceil(sqrt(dim))
    std::size_t max_depth = 16;
    std::uint64_t seed = 42;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    std::size_t feature_subset = 0;
    std::size_t max_depth = 0;
    LabelSet label_set;
    std::size_t dim = 0;
    std::uint64_t seed = 0;

    std::size_t n_trees() const { return trees.size(); }
};

// Bootstrap draw for one tree; public so tests can replay the exact sample.
inline std::vector<std::size_t> bootstrap_indices(std::uint64_t seed,
                                                  std::size_t tree_idx, std::size_t n) {
    auto rng = SplitMix64::derived(seed, tree_idx);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::size_t>(rng.below(n));
    return idx;
}

namespace rf_detail {

// Impurity gains below this are treated as zero (guards float noise in the
// weighted-Gini subtraction).
constexpr double kMinGain = 1e-12;

inline double gini(const std::vector<std::size_t>& counts, std::size_t total) {
    double g = 1.0;
    double inv = 1.0 / static_cast<double>(total);
    for (std::size_t c : counts) {
        double p = static_cast<double>(c) * inv;
        g -= p * p;
    }
    return g;
}

inline std::uint32_t majority_class(const std::vector<std::size_t>& counts) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < counts.size(); ++j)
        if (counts[j] > counts[best]) best = j;
    return static_cast<std::uint32_t>(best);
}

struct SplitChoice {
    bool found = false;
    std::uint32_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

// Best Gini-decrease split for one feature; thresholds are midpoints of the
// sorted distinct values present in the node sample.
inline SplitChoice best_split_on_feature(const std::vector<const Example*>& sample,
                                         const std::vector<std::size_t>& node,
                                         std::uint32_t feature, std::size_t classes,
                                         double parent_gini) {
    std::vector<std::pair<double, std::size_t>> vals;  // (value, class)
    vals.reserve(node.size());
    for (std::size_t i : node) {
        const Example& e = *sample[i];
        vals.emplace_back(static_cast<double>(e.features.value_at(feature)), e.label);
    }
    std::sort(vals.begin(), vals.end());
    if (vals.front().first == vals.back().first) return {};

    std::size_t n = vals.size();
    std::vector<std::size_t> left_counts(classes, 0), right_counts(classes, 0);
    for (const auto& [v, cls] : vals) right_counts[cls] += 1;

    SplitChoice best;
    std::size_t n_left = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        left_counts[vals[i].second] += 1;
        right_counts[vals[i].second] -= 1;
        ++n_left;
        if (vals[i].first == vals[i + 1].first) continue;  // not a boundary
        double wl = static_cast<double>(n_left) / static_cast<double>(n);
        double wr = 1.0 - wl;
        double gain = parent_gini - wl * gini(left_counts, n_left) -
                      wr * gini(right_counts, n - n_left);
        if (gain > best.gain + kMinGain || (!best.found && gain > kMinGain)) {
            best.found = true;
            best.feature = feature;
            best.threshold = (vals[i].first + vals[i + 1].first) / 2.0;
            best.gain = gain;
        }
    }
    return best;
}

struct TreeBuilder {
    const std::vector<const Example*>& sample;
    std::size_t classes;
    std::size_t dim;
    std::size_t m;
    std::size_t max_depth;
    SplitMix64& rng;
    DecisionTree tree;

    std::vector<std::uint32_t> sample_features() {
        std::vector<std::uint32_t> all(dim);
        std::iota(all.begin(), all.end(), 0u);
        if (m >= dim) return all;
        // partial Fisher-Yates, then sorted for a deterministic scan order
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.below(dim - i));
            std::swap(all[i], all[j]);
        }
        all.resize(m);
        std::sort(all.begin(), all.end());
        return all;
    }

    std::int32_t build(const std::vector<std::size_t>& node, std::size_t depth) {
        std::vector<std::size_t> counts(classes, 0);
        for (std::size_t i : node) counts[sample[i]->label] += 1;
        double parent_gini = gini(counts, node.size());

        auto make_leaf = [&]() {
            TreeNode leaf;
            leaf.leaf = true;
            leaf.cls = majority_class(counts);
            tree.nodes.push_back(leaf);
            return static_cast<std::int32_t>(tree.nodes.size() - 1);
        };

        if (parent_gini == 0.0 || depth >= max_depth) return make_leaf();

        SplitChoice best;
        for (std::uint32_t f : sample_features()) {
            auto cand = best_split_on_feature(sample, node, f, classes, parent_gini);
            if (cand.found && (!best.found || cand.gain > best.gain)) best = cand;
        }
        if (!best.found) return make_leaf();

        std::vector<std::size_t> left, right;
        for (std::size_t i : node) {
            double v = static_cast<double>(sample[i]->features.value_at(best.feature));
            (v <= best.threshold ? left : right).push_back(i);
        }

        TreeNode internal;
        internal.leaf = false;
        internal.feature = best.feature;
        internal.threshold = best.threshold;
        tree.nodes.push_back(internal);
        std::int32_t at = static_cast<std::int32_t>(tree.nodes.size() - 1);
        std::int32_t l = build(left, depth + 1);
        std::int32_t r = build(right, depth + 1);
        tree.nodes[at].left = l;
        tree.nodes[at].right = r;
        return at;
    }
};

inline DecisionTree train_tree(const std::vector<Example>& data, std::size_t classes,
                               std::size_t dim, std::size_t m, std::size_t max_depth,
                               std::uint64_t seed, std::size_t tree_idx) {
    auto boot = bootstrap_indices(seed, tree_idx, data.size());
    std::vector<const Example*> sample;
    sample.reserve(boot.size());
    for (std::size_t i : boot) sample.push_back(&data[i]);

    // feature sampling gets its own stream, decorrelated from the bootstrap
    auto rng = SplitMix64::derived(~seed, tree_idx);
    std::vector<std::size_t> all(sample.size());
    std::iota(all.begin(), all.end(), 0u);

    TreeBuilder builder{sample, classes, dim, m, max_depth, rng, {}};
    builder.build(all, 0);
    return std::move(builder.tree);
}

}  // namespace rf_detail

inline ForestModel train_rf(const VectorizedCorpus& corpus, const LabelSet& labels,
                            const RfParams& params) {
    std::size_t dim = corpus_dim(corpus);
    if (params.n_trees < 1 || params.max_depth < 1)
        throw InvalidParams("n_trees and max_depth must be >= 1");
    std::size_t m = params.feature_subset;
    if (m == 0) m = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(dim))));
    if (m < 1 || m > dim) throw InvalidParams("feature subset size out of range");

    auto data = corpus.flatten();
    std::size_t classes = labels.size();

    std::vector<std::size_t> tree_ids(params.n_trees);
    std::iota(tree_ids.begin(), tree_ids.end(), 0u);
    auto trees = par_map(partition(std::move(tree_ids), params.n_trees),
                         [&](std::size_t idx) {
                             return rf_detail::train_tree(data, classes, dim, m,
                                                          params.max_depth, params.seed,
                                                          idx);
                         });

    ForestModel model;
    model.trees = trees.flatten();
    model.feature_subset = m;
    model.max_depth = params.max_depth;
    model.label_set = labels;
    model.dim = dim;
    model.seed = params.seed;
    return model;
}

// probabilities[j] = (trees voting j) / n_trees
inline ClassProbabilities predict_rf(const ForestModel& model, const FeatureVector& x) {
    if (x.dim != model.dim) throw DimensionMismatch(model.dim, x.dim);
    std::vector<std::size_t> votes(model.label_set.size(), 0);
    for (const auto& tree : model.trees) votes[tree.predict(x)] += 1;
    std::vector<double> probs(votes.size());
    double n = static_cast<double>(model.n_trees());
    for (std::size_t j = 0; j < votes.size(); ++j)
        probs[j] = static_cast<double>(votes[j]) / n;
    return ClassProbabilities(std::move(probs));
}

}  // namespace textens
