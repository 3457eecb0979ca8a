#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles are
// deliberately written along a different computation route than the library
// (plain products instead of log space, exhaustive scans instead of the
// engine) so they can catch systematic mistakes.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "textens/dataset.hpp"
#include "textens/rng.hpp"
#include "textens/text.hpp"

namespace testutil {

using textens::Example;
using textens::FeatureVector;
using textens::VectorizedCorpus;

inline FeatureVector fv_from(const std::vector<std::uint32_t>& dense) {
    FeatureVector fv;
    fv.dim = static_cast<std::uint32_t>(dense.size());
    for (std::uint32_t d = 0; d < dense.size(); ++d)
        if (dense[d] > 0) fv.entries.emplace_back(d, dense[d]);
    return fv;
}

inline std::vector<std::uint32_t> dense_from(const FeatureVector& fv) {
    std::vector<std::uint32_t> dense(fv.dim, 0);
    for (const auto& [d, c] : fv.entries) dense[d] = c;
    return dense;
}

struct DenseExample {
    std::size_t label;
    std::vector<std::uint32_t> counts;
};

inline VectorizedCorpus corpus_from(const std::vector<DenseExample>& rows,
                                    std::size_t partitions) {
    std::vector<Example> examples;
    for (const auto& row : rows) examples.push_back({row.label, fv_from(row.counts)});
    return textens::partition(std::move(examples), partitions);
}

inline FeatureVector random_sparse(textens::SplitMix64& rng, std::uint32_t dim,
                                   std::uint32_t max_count, double density) {
    std::vector<std::uint32_t> dense(dim, 0);
    for (std::uint32_t d = 0; d < dim; ++d)
        if (rng.next_double() < density)
            dense[d] = 1 + static_cast<std::uint32_t>(rng.below(max_count));
    return fv_from(dense);
}

// Direct product-form Naive Bayes posterior: Laplace-smoothed estimates from
// raw counts, multiplied out in plain arithmetic and normalized at the end.
inline std::vector<double> nb_bruteforce_posterior(const std::vector<DenseExample>& rows,
                                                   std::size_t n_classes, double alpha,
                                                   const std::vector<std::uint32_t>& query) {
    std::size_t dim = query.size();
    std::vector<double> doc_counts(n_classes, 0.0);
    std::vector<double> term_totals(n_classes, 0.0);
    std::vector<std::vector<double>> term_counts(n_classes, std::vector<double>(dim, 0.0));
    for (const auto& row : rows) {
        doc_counts[row.label] += 1.0;
        for (std::size_t d = 0; d < dim; ++d) {
            term_counts[row.label][d] += row.counts[d];
            term_totals[row.label] += row.counts[d];
        }
    }
    double total_docs = static_cast<double>(rows.size());
    std::vector<double> scores(n_classes);
    for (std::size_t j = 0; j < n_classes; ++j) {
        double score = doc_counts[j] / total_docs;
        double denom = term_totals[j] + alpha * static_cast<double>(dim);
        for (std::size_t d = 0; d < dim; ++d)
            for (std::uint32_t rep = 0; rep < query[d]; ++rep)
                score *= (term_counts[j][d] + alpha) / denom;
        scores[j] = score;
    }
    double sum = 0.0;
    for (double s : scores) sum += s;
    for (double& s : scores) s /= sum;
    return scores;
}

}  // namespace testutil
