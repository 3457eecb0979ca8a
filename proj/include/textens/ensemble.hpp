#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "textens/class_probabilities.hpp"
#include "textens/dataset.hpp"
#include "textens/errors.hpp"
#include "textens/knn.hpp"
#include "textens/mlp.hpp"
#include "textens/naive_bayes.hpp"
#include "textens/random_forest.hpp"
#include "textens/rng.hpp"
#include "textens/svm.hpp"

namespace textens {

enum class Algo { nb, knn, svm, rf, mlp, ensemble };

inline const char* algo_name(Algo a) {
    switch (a) {
        case Algo::nb: return "nb";
        case Algo::knn: return "knn";
        case Algo::svm: return "svm";
        case Algo::rf: return "rf";
        case Algo::mlp: return "mlp";
        case Algo::ensemble: return "ensemble";
    }
    return "?";
}

inline Algo parse_algo(const std::string& name) {
    if (name == "nb") return Algo::nb;
    if (name == "knn") return Algo::knn;
    if (name == "svm") return Algo::svm;
    if (name == "rf") return Algo::rf;
    if (name == "mlp") return Algo::mlp;
    if (name == "ensemble") return Algo::ensemble;
    throw InvalidParams("unknown algorithm: " + name);
}

struct KnnOptions {
    std::size_t k = 1;
    DistanceMetric metric = DistanceMetric::cosine;
};

// Everything the trainers need, bundled for the CLI and cross-validation.
struct TrainOptions {
    Algo algo = Algo::ensemble;
    double nb_alpha = 1.0;
    KnnOptions knn;
    SvmHyperParams svm;
    RfParams rf;
    MlpTrainParams mlp;
    std::size_t partitions = 4;
};

// The five classifiers bundled over one vocabulary and label set.
struct EnsembleModel {
    NBModel nb;
    KnnKnowledgeBase knn;
    OvRModel svm;
    ForestModel rf;
    MLPModel dnn;
    LabelSet label_set;
    Vocabulary vocabulary;
    KnnOptions knn_options;
};

// Element-wise arithmetic mean of exactly five per-class score vectors.
inline ClassProbabilities ensemble_average(std::span<const ClassProbabilities> scores) {
    if (scores.size() != 5) throw WrongArity(5, scores.size());
    std::size_t len = scores[0].size();
    for (const auto& s : scores)
        if (s.size() != len) throw LengthMismatch(len, s.size());
    for (const auto& s : scores)
        for (double v : s.values())
            if (!(v >= 0.0)) throw InvalidParams("negative or NaN class score");
    std::vector<double> mean(len, 0.0);
    for (const auto& s : scores)
        for (std::size_t j = 0; j < len; ++j) mean[j] += s[j];
    for (double& v : mean) v /= 5.0;
    return ClassProbabilities(std::move(mean));
}

inline ClassProbabilities ensemble_average(const std::vector<ClassProbabilities>& scores) {
    return ensemble_average(std::span<const ClassProbabilities>(scores));
}

// An all-OOV query has no direction under the cosine metric; the ensemble
// layer maps that case to a uniform distribution.
inline ClassProbabilities knn_score_or_uniform(const KnnKnowledgeBase& kb,
                                               const FeatureVector& x,
                                               const KnnOptions& opts) {
    try {
        return knn_classify(kb, x, opts.k, opts.metric);
    } catch (const ZeroVector&) {
        return ClassProbabilities::uniform(kb.label_set.size());
    }
}

// Per-model scores for one phrase, in the reference table row order.
struct EnsembleScores {
    ClassProbabilities nb;
    ClassProbabilities rf;
    ClassProbabilities dnn;
    ClassProbabilities svm;
    ClassProbabilities knn;
    ClassProbabilities ensemble;
};

inline EnsembleScores score_phrase(const EnsembleModel& model, const std::string& text) {
    FeatureVector x = vectorize(tokenize(text), model.vocabulary);
    EnsembleScores s;
    s.nb = predict_nb(model.nb, x);
    s.rf = predict_rf(model.rf, x);
    s.dnn = mlp_forward(model.dnn, x);
    s.svm = predict_ovr(model.svm, x);
    s.knn = knn_score_or_uniform(model.knn, x, model.knn_options);
    std::vector<ClassProbabilities> five{s.nb, s.knn, s.svm, s.rf, s.dnn};
    s.ensemble = ensemble_average(five);
    return s;
}

inline std::pair<ClassProbabilities, std::string> predict_ensemble(
    const EnsembleModel& model, const std::string& text) {
    auto scores = score_phrase(model, text);
    std::size_t winner = scores.ensemble.argmax();
    return {std::move(scores.ensemble), model.label_set.label(winner)};
}

inline EnsembleModel train_ensemble(const std::vector<LabeledPhrase>& corpus,
                                    const TrainOptions& opts) {
    EnsembleModel model;
    model.label_set = LabelSet::from_corpus(corpus);
    model.vocabulary = build_vocabulary(corpus);
    model.knn_options = opts.knn;
    auto vc = vectorize_corpus(corpus, model.vocabulary, model.label_set, opts.partitions);
    model.nb = train_nb(vc, model.label_set, opts.nb_alpha);
    model.knn = build_knn(vc, model.label_set);
    model.svm = train_ovr(vc, model.label_set, opts.svm);
    model.rf = train_rf(vc, model.label_set, opts.rf);
    model.dnn = train_parameter_averaging(vc, model.label_set, opts.mlp);
    return model;
}

// ---------------------------------------------------------------------------
// Evaluation harness
// ---------------------------------------------------------------------------

using FeatureScorer = std::function<ClassProbabilities(const FeatureVector&)>;

struct EvalReport {
    double accuracy = 0.0;
    std::vector<std::vector<std::uint64_t>> confusion;  // [true][predicted]
    std::vector<double> per_fold;
};

// Accuracy and confusion counts of argmax predictions over a test set;
// scoring runs on the partition engine.
inline EvalReport evaluate(const std::vector<LabeledPhrase>& test,
                           const Vocabulary& vocab, const LabelSet& labels,
                           const FeatureScorer& scorer, std::size_t partitions) {
    if (test.empty()) throw EmptyTestSet();
    auto pd = partition(test, partitions);
    auto outcomes = par_map(pd, [&](const LabeledPhrase& p) {
        std::size_t truth = labels.ordinal(p.label);
        std::size_t pred = scorer(vectorize(tokenize(p.text), vocab)).argmax();
        return std::make_pair(truth, pred);
    });
    EvalReport report;
    report.confusion.assign(labels.size(), std::vector<std::uint64_t>(labels.size(), 0));
    std::uint64_t correct = 0;
    for (const auto& part : outcomes.partitions) {
        for (const auto& [truth, pred] : part) {
            report.confusion[truth][pred] += 1;
            if (truth == pred) ++correct;
        }
    }
    report.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
    return report;
}

// Trains the selected algorithm(s) on an already vectorized corpus and
// returns a feature scorer for it.
inline FeatureScorer train_scorer(const VectorizedCorpus& vc, const LabelSet& labels,
                                  const TrainOptions& opts) {
    switch (opts.algo) {
        case Algo::nb: {
            auto model = std::make_shared<NBModel>(train_nb(vc, labels, opts.nb_alpha));
            return [model](const FeatureVector& x) { return predict_nb(*model, x); };
        }
        case Algo::knn: {
            auto model = std::make_shared<KnnKnowledgeBase>(build_knn(vc, labels));
            auto knn_opts = opts.knn;
            return [model, knn_opts](const FeatureVector& x) {
                return knn_score_or_uniform(*model, x, knn_opts);
            };
        }
        case Algo::svm: {
            auto model = std::make_shared<OvRModel>(train_ovr(vc, labels, opts.svm));
            return [model](const FeatureVector& x) { return predict_ovr(*model, x); };
        }
        case Algo::rf: {
            auto model = std::make_shared<ForestModel>(train_rf(vc, labels, opts.rf));
            return [model](const FeatureVector& x) { return predict_rf(*model, x); };
        }
        case Algo::mlp: {
            auto model = std::make_shared<MLPModel>(
                train_parameter_averaging(vc, labels, opts.mlp));
            return [model](const FeatureVector& x) { return mlp_forward(*model, x); };
        }
        case Algo::ensemble: {
            auto nb = std::make_shared<NBModel>(train_nb(vc, labels, opts.nb_alpha));
            auto kb = std::make_shared<KnnKnowledgeBase>(build_knn(vc, labels));
            auto svm = std::make_shared<OvRModel>(train_ovr(vc, labels, opts.svm));
            auto rf = std::make_shared<ForestModel>(train_rf(vc, labels, opts.rf));
            auto dnn = std::make_shared<MLPModel>(
                train_parameter_averaging(vc, labels, opts.mlp));
            auto knn_opts = opts.knn;
            return [=](const FeatureVector& x) {
                std::vector<ClassProbabilities> five{
                    predict_nb(*nb, x), knn_score_or_uniform(*kb, x, knn_opts),
                    predict_ovr(*svm, x), predict_rf(*rf, x), mlp_forward(*dnn, x)};
                return ensemble_average(five);
            };
        }
    }
    throw InvalidParams("unreachable algo");
}

// Stratified k-fold: per class, examples are shuffled with the seed and
// dealt round-robin into folds. The vocabulary is rebuilt from the training
// folds only; the label set covers the whole corpus.
inline EvalReport cross_validate(const std::vector<LabeledPhrase>& corpus,
                                 std::size_t folds, const TrainOptions& opts,
                                 std::uint64_t seed) {
    if (folds < 2) throw InvalidParams("folds must be >= 2");
    if (corpus.empty()) throw EmptyCorpus();
    LabelSet labels = LabelSet::from_corpus(corpus);

    std::map<std::size_t, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < corpus.size(); ++i)
        by_class[labels.ordinal(corpus[i].label)].push_back(i);
    for (const auto& [cls, members] : by_class)
        if (members.size() < folds)
            throw InsufficientClassCount(labels.label(cls), members.size(), folds);

    std::vector<std::size_t> fold_of(corpus.size(), 0);
    for (auto& [cls, members] : by_class) {
        auto rng = SplitMix64::derived(seed, cls);
        rng.shuffle(members);
        for (std::size_t i = 0; i < members.size(); ++i)
            fold_of[members[i]] = i % folds;
    }

    EvalReport report;
    report.confusion.assign(labels.size(), std::vector<std::uint64_t>(labels.size(), 0));
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<LabeledPhrase> train, test;
        for (std::size_t i = 0; i < corpus.size(); ++i)
            (fold_of[i] == f ? test : train).push_back(corpus[i]);
        Vocabulary vocab = build_vocabulary(train);
        auto vc = vectorize_corpus(train, vocab, labels, opts.partitions);
        auto scorer = train_scorer(vc, labels, opts);
        auto fold_report = evaluate(test, vocab, labels, scorer, opts.partitions);
        report.per_fold.push_back(fold_report.accuracy);
        for (std::size_t i = 0; i < labels.size(); ++i)
            for (std::size_t j = 0; j < labels.size(); ++j)
                report.confusion[i][j] += fold_report.confusion[i][j];
    }
    double sum = 0.0;
    for (double a : report.per_fold) sum += a;
    report.accuracy = sum / static_cast<double>(folds);
    return report;
}

// ---------------------------------------------------------------------------
// Score tables (6 rows x |C| class columns)
// ---------------------------------------------------------------------------

struct ScoreTable {
    std::vector<std::string> row_names;
    std::vector<std::string> class_names;
    std::vector<ClassProbabilities> rows;  // full precision; rounding is display-only
};

inline ScoreTable score_table(const EnsembleModel& model, const std::string& text) {
    auto s = score_phrase(model, text);
    ScoreTable table;
    table.row_names = {"NaiveBayes", "RandomForest", "DNN", "SVM", "KNN", "ENSEMBLE"};
    table.class_names = model.label_set.labels();
    table.rows = {s.nb, s.rf, s.dnn, s.svm, s.knn, s.ensemble};
    return table;
}

namespace table_detail {

inline std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace table_detail

inline std::string render_table_text(const ScoreTable& table) {
    std::size_t name_width = 0;
    for (const auto& n : table.row_names) name_width = std::max(name_width, n.size());
    std::vector<std::size_t> widths;
    for (const auto& c : table.class_names) widths.push_back(std::max<std::size_t>(c.size(), 5));

    std::string out(name_width, ' ');
    for (std::size_t j = 0; j < table.class_names.size(); ++j) {
        out += "  ";
        out += std::string(widths[j] - table.class_names[j].size(), ' ');
        out += table.class_names[j];
    }
    out += '\n';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out += table.row_names[r];
        out += std::string(name_width - table.row_names[r].size(), ' ');
        for (std::size_t j = 0; j < table.class_names.size(); ++j) {
            std::string cell = table_detail::fixed3(table.rows[r][j]);
            out += "  ";
            out += std::string(widths[j] - cell.size(), ' ');
            out += cell;
        }
        out += '\n';
    }
    return out;
}

inline std::string render_table_csv(const ScoreTable& table) {
    std::string out = "model";
    for (const auto& c : table.class_names) {
        out += ',';
        out += c;
    }
    out += '\n';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out += table.row_names[r];
        for (std::size_t j = 0; j < table.class_names.size(); ++j) {
            out += ',';
            out += table_detail::fixed3(table.rows[r][j]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace textens
