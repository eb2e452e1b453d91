#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gamix/classifiers/decision_tree.hpp"
#include "helpers.hpp"

using namespace gamix;
using test_helpers::make_dataset;

namespace {

// Independent split oracle: direct two-class Gini bookkeeping over every
// candidate (feature, midpoint threshold).
double oracle_impurity(std::size_t pos, std::size_t total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    const double q = 1.0 - p;
    return 1.0 - p * p - q * q;
}

double oracle_gain(const Matrix& X, const std::vector<int>& y,
                   const std::vector<std::size_t>& idx, int feature, double threshold) {
    std::size_t lp = 0, ln = 0, rp = 0, rn = 0;
    for (auto i : idx) {
        const bool left = X(static_cast<Eigen::Index>(i), feature) <= threshold;
        const bool positive = y[i] == kPositive;
        if (left)
            positive ? ++lp : ++ln;
        else
            positive ? ++rp : ++rn;
    }
    const std::size_t n = idx.size(), nl = lp + ln, nr = rp + rn;
    const double parent = oracle_impurity(lp + rp, n);
    return parent - (static_cast<double>(nl) / static_cast<double>(n)) * oracle_impurity(lp, nl) -
           (static_cast<double>(nr) / static_cast<double>(n)) * oracle_impurity(rp, nr);
}

double oracle_best_gain(const Matrix& X, const std::vector<int>& y,
                        const std::vector<std::size_t>& idx) {
    double best = 0.0;
    for (int f = 0; f < X.cols(); ++f) {
        std::vector<double> values;
        for (auto i : idx) values.push_back(X(static_cast<Eigen::Index>(i), f));
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t k = 0; k + 1 < values.size(); ++k) {
            const double threshold = 0.5 * (values[k] + values[k + 1]);
            best = std::max(best, oracle_gain(X, y, idx, f, threshold));
        }
    }
    return best;
}

void verify_optimal_splits(const Matrix& X, const std::vector<int>& y,
                           const std::vector<std::size_t>& idx, const TreeNode& node) {
    if (node.is_leaf()) return;
    const double chosen = oracle_gain(X, y, idx, node.feature, node.threshold);
    const double best = oracle_best_gain(X, y, idx);
    CHECK(chosen == doctest::Approx(best).epsilon(1e-9));

    std::vector<std::size_t> left, right;
    for (auto i : idx)
        (X(static_cast<Eigen::Index>(i), node.feature) <= node.threshold ? left : right)
            .push_back(i);
    CHECK(!left.empty());
    CHECK(!right.empty());
    verify_optimal_splits(X, y, left, *node.left);
    verify_optimal_splits(X, y, right, *node.right);
}

Dataset random_dataset(Rng& rng, std::size_t max_rows, int max_features) {
    std::uniform_int_distribution<std::size_t> n_dist(4, max_rows);
    std::uniform_int_distribution<int> d_dist(1, max_features);
    std::uniform_int_distribution<int> grid(-3, 3);  // coarse so ties happen
    std::uniform_int_distribution<int> bit(0, 1);
    const std::size_t n = n_dist(rng);
    const int d = d_dist(rng);

    std::vector<std::vector<double>> rows(n, std::vector<double>(static_cast<std::size_t>(d)));
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j)
            rows[i][static_cast<std::size_t>(j)] = static_cast<double>(grid(rng)) / 3.0;
        labels[i] = bit(rng);
    }
    return make_dataset(rows, labels);
}

}  // namespace

TEST_CASE("single-class data collapses to one leaf") {
    const auto ds = make_dataset({{1.0}, {2.0}, {3.0}}, {1, 1, 1});
    const auto tree = fit_decision_tree(ds, ClassifierSpec::make(ClassifierFamily::decision_tree), 1);
    CHECK(tree.root().is_leaf());
    CHECK(tree.root().label == kPositive);
}

TEST_CASE("rows identical on all features become a majority leaf") {
    const auto ds = make_dataset({{2.0}, {2.0}, {2.0}}, {0, 0, 1});
    const auto tree = fit_decision_tree(ds, ClassifierSpec::make(ClassifierFamily::decision_tree), 1);
    CHECK(tree.root().is_leaf());
    CHECK(tree.root().label == kNegative);
}

TEST_CASE("separable 1-D data yields a depth-1 tree with full accuracy") {
    const auto ds = make_dataset({{-1.0}, {-0.5}, {0.5}, {1.0}}, {0, 0, 1, 1});
    const auto tree = fit_decision_tree(ds, ClassifierSpec::make(ClassifierFamily::decision_tree), 1);
    REQUIRE(!tree.root().is_leaf());
    CHECK(tree.root().depth() == 1);
    CHECK(tree.root().threshold > -0.5);
    CHECK(tree.root().threshold < 0.5);
    CHECK(tree.predict(ds.rows) == ds.labels);
}

TEST_CASE("every split attains the maximum Gini reduction") {
    Rng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        const auto ds = random_dataset(rng, 48, 3);
        const auto tree =
            fit_decision_tree(ds, ClassifierSpec::make(ClassifierFamily::decision_tree), trial);
        std::vector<std::size_t> idx(ds.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        verify_optimal_splits(ds.rows, ds.labels, idx, tree.root());
    }
}

TEST_CASE("max depth caps the tree") {
    Rng rng(31);
    const auto ds = random_dataset(rng, 64, 3);
    auto spec = ClassifierSpec::make(ClassifierFamily::decision_tree);
    spec.tree.max_depth = 2;
    const auto tree = fit_decision_tree(ds, spec, 1);
    CHECK(tree.root().depth() <= 2);
}

TEST_CASE("training rows are reproduced by a zero-error tree") {
    const auto ds =
        make_dataset({{0.1, 0.3}, {0.9, 0.2}, {0.4, 0.8}, {0.6, 0.1}}, {0, 1, 1, 0});
    const auto tree = fit_decision_tree(ds, ClassifierSpec::make(ClassifierFamily::decision_tree), 5);
    CHECK(tree.predict(ds.rows) == ds.labels);

    SUBCASE("prediction is deterministic") {
        CHECK(tree.predict(ds.rows) == tree.predict(ds.rows));
    }
    SUBCASE("empty row set maps to an empty label vector") {
        Matrix empty(0, 2);
        CHECK(tree.predict(empty).empty());
    }
    SUBCASE("width mismatch is rejected") {
        Matrix wrong(1, 3);
        wrong.setZero();
        CHECK_THROWS_AS(tree.predict(wrong), DataError);
    }
}

TEST_CASE("empty training set is rejected") {
    Dataset empty;
    empty.schema = FeatureSchema::generic(2);
    empty.rows.resize(0, 2);
    CHECK_THROWS_AS(
        fit_decision_tree(empty, ClassifierSpec::make(ClassifierFamily::decision_tree), 1),
        DataError);
}

TEST_CASE("tree JSON reload reproduces predictions") {
    Rng rng(77);
    const auto ds = random_dataset(rng, 40, 3);
    const auto tree = fit_decision_tree(ds, ClassifierSpec::make(ClassifierFamily::decision_tree), 3);
    const auto reloaded = model_from_json(tree.to_json());
    CHECK(reloaded->predict(ds.rows) == tree.predict(ds.rows));
    CHECK(reloaded->family() == ClassifierFamily::decision_tree);
}
