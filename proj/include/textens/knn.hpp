#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <tuple>
#include <vector>

#include "textens/class_probabilities.hpp"
#include "textens/dataset.hpp"
#include "textens/distance.hpp"
#include "textens/errors.hpp"

namespace textens {

// Instance-based classifier: the stored training phrases ARE the model.
struct KnnKnowledgeBase {
    VectorizedCorpus instances;
    LabelSet label_set;
    std::size_t dim = 0;
};

inline KnnKnowledgeBase build_knn(VectorizedCorpus instances, const LabelSet& labels) {
    KnnKnowledgeBase kb;
    kb.dim = corpus_dim(instances);  // also rejects the empty corpus
    kb.instances = std::move(instances);
    kb.label_set = labels;
    return kb;
}

// k = 1 follows the distributed construction: distances via par_map, the
// per-label minimum via group_min_by_key, winner = global minimum (lowest
// ordinal on ties). k > 1 is a majority vote with vote fractions as output.
inline ClassProbabilities knn_classify(const KnnKnowledgeBase& kb,
                                       const FeatureVector& query, std::size_t k,
                                       DistanceMetric metric) {
    if (k < 1) throw InvalidParams("k must be >= 1");
    if (query.dim != kb.dim) throw DimensionMismatch(kb.dim, query.dim);
    std::size_t classes = kb.label_set.size();

    auto scored = par_map(kb.instances, [&](const Example& e) {
        return std::make_pair(e.label, distance(metric, query, e.features));
    });

    if (k == 1) {
        auto per_label_min = group_min_by_key(scored);
        std::size_t winner = 0;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [label, dist] : per_label_min) {
            if (dist < best) {
                best = dist;
                winner = label;
            }
        }
        return ClassProbabilities::one_hot(classes, winner);
    }

    // global order index breaks distance ties deterministically
    std::vector<std::tuple<double, std::size_t, std::size_t>> all;  // (dist, idx, label)
    all.reserve(scored.total_len());
    std::size_t idx = 0;
    for (const auto& part : scored.partitions)
        for (const auto& [label, dist] : part) all.emplace_back(dist, idx++, label);

    std::size_t voters = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + voters, all.end());
    std::vector<double> votes(classes, 0.0);
    for (std::size_t i = 0; i < voters; ++i) votes[std::get<2>(all[i])] += 1.0;
    for (double& v : votes) v /= static_cast<double>(voters);
    return ClassProbabilities(std::move(votes));
}

}  // namespace textens
