#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "textens/random_forest.hpp"

using namespace textens;
using testutil::DenseExample;
using testutil::corpus_from;
using testutil::fv_from;

namespace {

// Exhaustive split-search oracle: scans every feature and every midpoint
// threshold over the given sample and returns the best Gini decrease.
struct OracleSplit {
    std::uint32_t feature = 0;
    double threshold = 0.0;
    double gain = -1.0;
};

double oracle_gini(const std::vector<std::size_t>& labels, std::size_t classes) {
    std::vector<double> counts(classes, 0.0);
    for (auto l : labels) counts[l] += 1.0;
    double g = 1.0;
    for (double c : counts) {
        double p = c / static_cast<double>(labels.size());
        g -= p * p;
    }
    return g;
}

OracleSplit oracle_best_split(const std::vector<Example>& sample, std::size_t classes,
                              std::size_t dim) {
    std::vector<std::size_t> all_labels;
    for (const auto& e : sample) all_labels.push_back(e.label);
    double parent = oracle_gini(all_labels, classes);
    OracleSplit best;
    for (std::uint32_t f = 0; f < dim; ++f) {
        std::set<double> values;
        for (const auto& e : sample) values.insert(e.features.value_at(f));
        std::vector<double> sorted(values.begin(), values.end());
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
            double thr = (sorted[i] + sorted[i + 1]) / 2.0;
            std::vector<std::size_t> left, right;
            for (const auto& e : sample)
                (e.features.value_at(f) <= thr ? left : right).push_back(e.label);
            double n = static_cast<double>(sample.size());
            double gain = parent -
                          (static_cast<double>(left.size()) / n) * oracle_gini(left, classes) -
                          (static_cast<double>(right.size()) / n) * oracle_gini(right, classes);
            if (gain > best.gain) {
                best.feature = f;
                best.threshold = thr;
                best.gain = gain;
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("a perfect splitter yields a depth-1 tree on that feature") {
    // feature 0 separates the classes; the others are constant
    std::vector<DenseExample> rows{{0, {0, 1, 1}}, {0, {0, 1, 1}}, {0, {0, 1, 1}},
                                   {1, {2, 1, 1}}, {1, {2, 1, 1}}, {1, {2, 1, 1}},
                                   {0, {0, 1, 1}}, {1, {2, 1, 1}}};
    auto vc = corpus_from(rows, 2);
    RfParams params;
    params.n_trees = 1;
    params.feature_subset = 3;  // m = dim, no feature sampling
    params.seed = 42;
    auto model = train_rf(vc, LabelSet({"A", "B"}), params);
    REQUIRE(model.trees.size() == 1);
    const auto& tree = model.trees[0];

    // replay the bootstrap and ask the oracle for the best split
    auto data = vc.flatten();
    auto boot = bootstrap_indices(params.seed, 0, data.size());
    std::vector<Example> sample;
    for (auto i : boot) sample.push_back(data[i]);
    bool pure = true;
    for (const auto& e : sample) pure &= (e.label == sample[0].label);
    REQUIRE(!pure);  // seed 42 keeps both classes in the bootstrap

    auto expect = oracle_best_split(sample, 2, 3);
    CHECK(expect.feature == 0);

    REQUIRE(tree.nodes.size() == 3);
    CHECK_FALSE(tree.nodes[0].leaf);
    CHECK(tree.nodes[0].feature == expect.feature);
    CHECK(tree.nodes[0].threshold == doctest::Approx(expect.threshold));
    CHECK(tree.nodes[tree.nodes[0].left].leaf);
    CHECK(tree.nodes[tree.nodes[0].right].leaf);

    CHECK(predict_rf(model, fv_from({0, 1, 1})).values() == std::vector<double>{1.0, 0.0});
    CHECK(predict_rf(model, fv_from({2, 1, 1})).values() == std::vector<double>{0.0, 1.0});
}

TEST_CASE("library splits match the exhaustive oracle on random samples") {
    SplitMix64 rng(71);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<DenseExample> rows;
        std::size_t n = 6 + rng.below(10);
        for (std::size_t i = 0; i < n; ++i) {
            DenseExample row;
            row.label = rng.below(2);
            row.counts = {static_cast<std::uint32_t>(rng.below(3)),
                          static_cast<std::uint32_t>(rng.below(3)),
                          static_cast<std::uint32_t>(rng.below(3)),
                          static_cast<std::uint32_t>(rng.below(3))};
            rows.push_back(row);
        }
        auto vc = corpus_from(rows, 1);
        RfParams params;
        params.n_trees = 1;
        params.feature_subset = 4;
        params.max_depth = 1;  // a single split, if any
        params.seed = 1000 + trial;
        auto model = train_rf(vc, LabelSet({"A", "B"}), params);
        const auto& tree = model.trees[0];

        auto boot = bootstrap_indices(params.seed, 0, rows.size());
        std::vector<Example> sample;
        auto data = vc.flatten();
        for (auto i : boot) sample.push_back(data[i]);
        auto expect = oracle_best_split(sample, 2, 4);

        if (tree.nodes[0].leaf) continue;  // pure bootstrap or no positive gain
        double library_gain = [&] {
            std::vector<std::size_t> left, right;
            for (const auto& e : sample)
                (e.features.value_at(tree.nodes[0].feature) <= tree.nodes[0].threshold
                     ? left
                     : right)
                    .push_back(e.label);
            std::vector<std::size_t> all;
            for (const auto& e : sample) all.push_back(e.label);
            double n_d = static_cast<double>(sample.size());
            return oracle_gini(all, 2) -
                   (static_cast<double>(left.size()) / n_d) * oracle_gini(left, 2) -
                   (static_cast<double>(right.size()) / n_d) * oracle_gini(right, 2);
        }();
        CHECK(library_gain == doctest::Approx(expect.gain).epsilon(1e-9));
    }
}

TEST_CASE("a single-class corpus trains single-leaf trees") {
    auto vc = corpus_from({{0, {1, 2}}, {0, {2, 1}}, {0, {0, 1}}}, 1);
    RfParams params;
    params.n_trees = 5;
    auto model = train_rf(vc, LabelSet({"ONLY"}), params);
    for (const auto& tree : model.trees) {
        REQUIRE(tree.nodes.size() == 1);
        CHECK(tree.nodes[0].leaf);
        CHECK(tree.nodes[0].cls == 0);
    }
}

TEST_CASE("training is reproducible per seed and varies across seeds") {
    SplitMix64 rng(72);
    std::vector<DenseExample> rows;
    for (int i = 0; i < 40; ++i) {
        DenseExample row;
        row.label = rng.below(3);
        row.counts.resize(6);
        for (auto& c : row.counts)
            c = static_cast<std::uint32_t>(rng.below(3) + (row.label == 1 ? 1 : 0));
        rows.push_back(row);
    }
    auto vc = corpus_from(rows, 4);
    LabelSet labels({"A", "B", "C"});
    RfParams params;
    params.n_trees = 10;

    auto m1 = train_rf(vc, labels, params);
    auto m2 = train_rf(vc, labels, params);
    REQUIRE(m1.trees.size() == m2.trees.size());
    for (std::size_t t = 0; t < m1.trees.size(); ++t) {
        REQUIRE(m1.trees[t].nodes.size() == m2.trees[t].nodes.size());
        for (std::size_t i = 0; i < m1.trees[t].nodes.size(); ++i) {
            CHECK(m1.trees[t].nodes[i].leaf == m2.trees[t].nodes[i].leaf);
            CHECK(m1.trees[t].nodes[i].feature == m2.trees[t].nodes[i].feature);
            CHECK(m1.trees[t].nodes[i].threshold == m2.trees[t].nodes[i].threshold);
        }
    }

    params.seed = 77;
    auto m3 = train_rf(vc, labels, params);
    bool any_difference = false;
    for (std::size_t t = 0; t < m1.trees.size() && !any_difference; ++t)
        any_difference = bootstrap_indices(42, t, rows.size()) !=
                         bootstrap_indices(77, t, rows.size());
    CHECK(any_difference);
    (void)m3;
}

TEST_CASE("vote fractions are exact rationals summing to one") {
    SplitMix64 rng(73);
    std::vector<DenseExample> rows;
    for (int i = 0; i < 30; ++i) {
        DenseExample row;
        row.label = rng.below(3);
        row.counts.resize(5);
        for (std::size_t d = 0; d < 5; ++d)
            row.counts[d] = static_cast<std::uint32_t>(rng.below(2) +
                                                       (row.label == d % 3 ? 2 : 0));
        rows.push_back(row);
    }
    auto vc = corpus_from(rows, 2);
    RfParams params;
    params.n_trees = 7;
    auto model = train_rf(vc, LabelSet({"A", "B", "C"}), params);
    for (int trial = 0; trial < 20; ++trial) {
        auto query = testutil::random_sparse(rng, 5, 3, 0.7);
        auto probs = predict_rf(model, query);
        long long total_votes = 0;
        for (std::size_t j = 0; j < probs.size(); ++j) {
            double votes = probs[j] * 7.0;
            CHECK(votes == std::round(votes));  // exact multiple of 1/n_trees
            total_votes += static_cast<long long>(std::round(votes));
        }
        CHECK(total_votes == 7);
    }
}

TEST_CASE("a forest of one tree is always one-hot") {
    auto vc = corpus_from({{0, {0, 2}}, {1, {2, 0}}, {0, {0, 1}}, {1, {1, 0}}}, 1);
    RfParams params;
    params.n_trees = 1;
    params.feature_subset = 2;
    auto model = train_rf(vc, LabelSet({"A", "B"}), params);
    SplitMix64 rng(74);
    for (int trial = 0; trial < 20; ++trial) {
        auto probs = predict_rf(model, testutil::random_sparse(rng, 2, 3, 0.8));
        CHECK((probs[0] == 1.0 || probs[1] == 1.0));
        CHECK(probs[0] + probs[1] == 1.0);
    }
}

TEST_CASE("unanimous forests report 1.000 for the winning class") {
    // strongly separated classes: every tree votes the same way
    std::vector<DenseExample> rows;
    for (std::size_t c = 0; c < 3; ++c)
        for (int i = 0; i < 10; ++i) {
            std::vector<std::uint32_t> v(6, 0);
            v[c] = 3;
            v[3 + c] = 1 + static_cast<std::uint32_t>(i % 2);
            rows.push_back({c, v});
        }
    auto vc = corpus_from(rows, 3);
    RfParams params;
    params.n_trees = 25;
    params.feature_subset = 6;
    auto model = train_rf(vc, LabelSet({"A", "B", "C"}), params);
    std::vector<std::uint32_t> query(6, 0);
    query[1] = 3;  // deep inside class B territory
    auto probs = predict_rf(model, fv_from(query));
    CHECK(probs[1] == 1.0);
    CHECK(probs[0] == 0.0);
    CHECK(probs[2] == 0.0);
}

TEST_CASE("prediction reads absent dimensions as zero") {
    auto vc = corpus_from({{0, {0, 2, 0}}, {1, {2, 0, 1}}}, 1);
    RfParams params;
    params.n_trees = 3;
    params.feature_subset = 3;
    auto model = train_rf(vc, LabelSet({"A", "B"}), params);
    FeatureVector sparse;  // nothing set: all dims zero
    sparse.dim = 3;
    auto probs = predict_rf(model, sparse);
    CHECK(probs.size() == 2);
    CHECK(probs[0] + probs[1] == doctest::Approx(1.0));
}

TEST_CASE("random forest error paths") {
    VectorizedCorpus empty;
    empty.partitions = {{}};
    CHECK_THROWS_AS(train_rf(empty, LabelSet({"A"}), RfParams{}), EmptyCorpus);

    auto vc = corpus_from({{0, {1, 0}}, {1, {0, 1}}}, 1);
    RfParams bad;
    bad.n_trees = 0;
    CHECK_THROWS_AS(train_rf(vc, LabelSet({"A", "B"}), bad), InvalidParams);
    bad = RfParams{};
    bad.feature_subset = 99;
    CHECK_THROWS_AS(train_rf(vc, LabelSet({"A", "B"}), bad), InvalidParams);

    RfParams ok;
    ok.n_trees = 2;
    auto model = train_rf(vc, LabelSet({"A", "B"}), ok);
    CHECK_THROWS_AS(predict_rf(model, fv_from({1, 0, 0})), DimensionMismatch);
}
