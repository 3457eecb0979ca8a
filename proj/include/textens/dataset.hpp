#pragma once

#include <cstddef>
#include <vector>

#include "textens/partition.hpp"
#include "textens/text.hpp"

namespace textens {

// A vectorized training record: class ordinal plus term-frequency vector.
struct Example {
    std::size_t label = 0;
    FeatureVector features;
};

using VectorizedCorpus = PartitionedDataset<Example>;

inline VectorizedCorpus vectorize_corpus(const std::vector<LabeledPhrase>& corpus,
                                         const Vocabulary& vocab,
                                         const LabelSet& labels,
                                         std::size_t partitions) {
    std::vector<Example> examples;
    examples.reserve(corpus.size());
    for (const auto& phrase : corpus) {
        Example e;
        e.label = labels.ordinal(phrase.label);
        e.features = vectorize(tokenize(phrase.text), vocab);
        examples.push_back(std::move(e));
    }
    return partition(std::move(examples), partitions);
}

// Shared dimensionality of a vectorized corpus; rejects mixed dims.
inline std::size_t corpus_dim(const VectorizedCorpus& corpus) {
    if (corpus.total_len() == 0) throw EmptyCorpus();
    std::size_t dim = 0;
    bool first = true;
    for (const auto& part : corpus.partitions) {
        for (const auto& e : part) {
            if (first) {
                dim = e.features.dim;
                first = false;
            } else if (e.features.dim != dim) {
                throw DimensionMismatch(dim, e.features.dim);
            }
        }
    }
    return dim;
}

}  // namespace textens
