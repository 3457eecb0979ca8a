#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "textens/class_probabilities.hpp"
#include "textens/dataset.hpp"
#include "textens/errors.hpp"

namespace textens {

// Multinomial Naive Bayes with Laplace smoothing. Priors and per-class term
// likelihoods are kept in log space; prediction softmax-normalizes the
// posterior scores so the output is a proper distribution.
struct NBModel {
    std::vector<double> log_priors;       // |C|
    std::vector<double> log_likelihoods;  // |C| x dim, row-major
    double smoothing = 1.0;
    LabelSet label_set;
    std::size_t dim = 0;

    double log_likelihood(std::size_t cls, std::size_t term) const {
        return log_likelihoods[cls * dim + term];
    }
};

namespace nb_detail {

// Integer count accumulator; integer sums make training independent of the
// partition count, bit for bit.
struct Counts {
    std::vector<std::uint64_t> docs_per_class;
    std::vector<std::uint64_t> terms_per_class;
    std::vector<std::uint64_t> term_counts;  // |C| x dim

    static Counts zero(std::size_t classes, std::size_t dim) {
        Counts c;
        c.docs_per_class.assign(classes, 0);
        c.terms_per_class.assign(classes, 0);
        c.term_counts.assign(classes * dim, 0);
        return c;
    }
};

}  // namespace nb_detail

inline NBModel train_nb(const VectorizedCorpus& corpus, const LabelSet& labels,
                        double alpha) {
    if (alpha <= 0.0) throw InvalidParams("smoothing alpha must be > 0");
    std::size_t dim = corpus_dim(corpus);
    std::size_t classes = labels.size();

    auto counts = par_fold(
        corpus, nb_detail::Counts::zero(classes, dim),
        [dim](nb_detail::Counts acc, const Example& e) {
            acc.docs_per_class[e.label] += 1;
            for (const auto& [d, c] : e.features.entries) {
                acc.term_counts[e.label * dim + d] += c;
                acc.terms_per_class[e.label] += c;
            }
            return acc;
        },
        [](nb_detail::Counts a, nb_detail::Counts b) {
            for (std::size_t i = 0; i < a.docs_per_class.size(); ++i)
                a.docs_per_class[i] += b.docs_per_class[i];
            for (std::size_t i = 0; i < a.terms_per_class.size(); ++i)
                a.terms_per_class[i] += b.terms_per_class[i];
            for (std::size_t i = 0; i < a.term_counts.size(); ++i)
                a.term_counts[i] += b.term_counts[i];
            return a;
        });

    std::uint64_t total_docs = 0;
    for (auto n : counts.docs_per_class) total_docs += n;

    NBModel model;
    model.smoothing = alpha;
    model.label_set = labels;
    model.dim = dim;
    model.log_priors.resize(classes);
    model.log_likelihoods.resize(classes * dim);
    for (std::size_t j = 0; j < classes; ++j) {
        model.log_priors[j] = std::log(static_cast<double>(counts.docs_per_class[j]) /
                                       static_cast<double>(total_docs));
        double denom = static_cast<double>(counts.terms_per_class[j]) +
                       alpha * static_cast<double>(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            double num = static_cast<double>(counts.term_counts[j * dim + k]) + alpha;
            model.log_likelihoods[j * dim + k] = std::log(num / denom);
        }
    }
    return model;
}

namespace nb_detail {

inline ClassProbabilities softmax(std::vector<double> scores) {
    double max_score = scores[0];
    for (double s : scores)
        if (s > max_score) max_score = s;
    double sum = 0.0;
    for (double& s : scores) {
        s = std::exp(s - max_score);
        sum += s;
    }
    for (double& s : scores) s /= sum;
    return ClassProbabilities(std::move(scores));
}

}  // namespace nb_detail

inline ClassProbabilities predict_nb(const NBModel& model, const FeatureVector& x) {
    if (x.dim != model.dim) throw DimensionMismatch(model.dim, x.dim);
    std::size_t classes = model.log_priors.size();
    std::vector<double> scores(classes);
    for (std::size_t j = 0; j < classes; ++j) {
        double s = model.log_priors[j];
        for (const auto& [d, c] : x.entries)
            s += static_cast<double>(c) * model.log_likelihood(j, d);
        scores[j] = s;
    }
    return nb_detail::softmax(std::move(scores));
}

}  // namespace textens
