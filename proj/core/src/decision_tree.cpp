#include "gamix/classifiers/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gamix {

int TreeNode::depth() const {
    if (is_leaf()) return 0;
    return 1 + std::max(left->depth(), right->depth());
}

double gini_impurity(std::size_t positives, std::size_t total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(positives) / static_cast<double>(total);
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

namespace detail {

namespace {

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Node rows are kept as one index list per feature, each sorted by that
// feature's value. Splitting partitions every list stably, so children stay
// sorted without re-sorting.
using SortedLists = std::vector<std::vector<std::uint32_t>>;

SplitChoice best_split(const Matrix& X, const std::vector<int>& y, const SortedLists& lists,
                       const std::vector<int>& candidates, std::size_t total_pos) {
    SplitChoice best;
    const std::size_t n = lists[0].size();
    const double parent = gini_impurity(total_pos, n);

    for (int f : candidates) {
        const auto& order = lists[static_cast<std::size_t>(f)];
        std::size_t left_n = 0, left_pos = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const auto row = order[i];
            left_n += 1;
            left_pos += static_cast<std::size_t>(y[row] == kPositive);
            const double v = X(row, f);
            const double next = X(order[i + 1], f);
            if (v == next) continue;
            const double wl = static_cast<double>(left_n) / static_cast<double>(n);
            const double child =
                wl * gini_impurity(left_pos, left_n) +
                (1.0 - wl) * gini_impurity(total_pos - left_pos, n - left_n);
            const double gain = parent - child;
            if (gain > best.gain) {
                best.gain = gain;
                best.feature = f;
                best.threshold = v + 0.5 * (next - v);
            }
        }
    }
    return best;
}

std::unique_ptr<TreeNode> make_leaf(std::size_t positives, std::size_t total) {
    auto node = std::make_unique<TreeNode>();
    node->label = (2 * positives >= total) ? kPositive : kNegative;
    return node;
}

std::unique_ptr<TreeNode> build(const Matrix& X, const std::vector<int>& y, SortedLists lists,
                                int depth, int max_depth, int features_per_split, Rng& rng) {
    const std::size_t n = lists[0].size();
    std::size_t positives = 0;
    for (auto row : lists[0]) positives += static_cast<std::size_t>(y[row] == kPositive);

    if (positives == 0 || positives == n || n < 2) return make_leaf(positives, n);
    if (max_depth > 0 && depth >= max_depth) return make_leaf(positives, n);

    const int d = static_cast<int>(lists.size());
    std::vector<int> candidates(static_cast<std::size_t>(d));
    std::iota(candidates.begin(), candidates.end(), 0);
    if (features_per_split > 0 && features_per_split < d) {
        for (int i = 0; i < features_per_split; ++i) {
            std::uniform_int_distribution<int> pick(i, d - 1);
            std::swap(candidates[static_cast<std::size_t>(i)],
                      candidates[static_cast<std::size_t>(pick(rng))]);
        }
        candidates.resize(static_cast<std::size_t>(features_per_split));
        std::sort(candidates.begin(), candidates.end());
    }

    const SplitChoice split = best_split(X, y, lists, candidates, positives);
    if (split.feature < 0 || split.gain <= 1e-15) return make_leaf(positives, n);

    SortedLists left(lists.size()), right(lists.size());
    for (std::size_t f = 0; f < lists.size(); ++f) {
        for (auto row : lists[f]) {
            if (X(row, split.feature) <= split.threshold)
                left[f].push_back(row);
            else
                right[f].push_back(row);
        }
        lists[f].clear();
        lists[f].shrink_to_fit();
    }

    auto node = std::make_unique<TreeNode>();
    node->feature = split.feature;
    node->threshold = split.threshold;
    node->left = build(X, y, std::move(left), depth + 1, max_depth, features_per_split, rng);
    node->right = build(X, y, std::move(right), depth + 1, max_depth, features_per_split, rng);
    return node;
}

}  // namespace

std::unique_ptr<TreeNode> grow_tree(const Matrix& X, const std::vector<int>& y,
                                    const std::vector<std::size_t>& indices, int max_depth,
                                    int features_per_split, Rng& rng) {
    const auto d = static_cast<std::size_t>(X.cols());
    SortedLists lists(d);
    for (std::size_t f = 0; f < d; ++f) {
        auto& order = lists[f];
        order.reserve(indices.size());
        for (auto i : indices) order.push_back(static_cast<std::uint32_t>(i));
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return X(a, static_cast<Eigen::Index>(f)) < X(b, static_cast<Eigen::Index>(f));
        });
    }
    return build(X, y, std::move(lists), 0, max_depth, features_per_split, rng);
}

nlohmann::json tree_to_json(const TreeNode& node) {
    if (node.is_leaf()) return {{"label", node.label}};
    return {{"feature", node.feature},
            {"threshold", node.threshold},
            {"left", tree_to_json(*node.left)},
            {"right", tree_to_json(*node.right)}};
}

std::unique_ptr<TreeNode> tree_from_json(const nlohmann::json& j) {
    auto node = std::make_unique<TreeNode>();
    if (j.contains("label")) {
        node->label = j.at("label").get<int>();
        return node;
    }
    node->feature = j.at("feature").get<int>();
    node->threshold = j.at("threshold").get<double>();
    node->left = tree_from_json(j.at("left"));
    node->right = tree_from_json(j.at("right"));
    return node;
}

}  // namespace detail

DecisionTreeModel fit_decision_tree(const Dataset& train, const ClassifierSpec& spec,
                                    std::uint64_t seed) {
    train.check();
    if (train.size() == 0) throw DataError("cannot fit a decision tree on an empty dataset");

    std::vector<std::size_t> all(train.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    Rng rng(derive_seed(seed, 0x7eeeu));
    auto root = detail::grow_tree(train.rows, train.labels, all, spec.tree.max_depth, 0, rng);
    return DecisionTreeModel(std::move(root), spec.tree, train.width());
}

int DecisionTreeModel::predict_row(const double* row) const {
    const TreeNode* node = root_.get();
    while (!node->is_leaf())
        node = (row[node->feature] <= node->threshold) ? node->left.get() : node->right.get();
    return node->label;
}

std::vector<int> DecisionTreeModel::predict(const Matrix& rows) const {
    check_width(rows);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(rows.rows()));
    std::vector<double> buf(static_cast<std::size_t>(rows.cols()));
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows.cols(); ++j) buf[static_cast<std::size_t>(j)] = rows(i, j);
        out.push_back(predict_row(buf.data()));
    }
    return out;
}

nlohmann::json DecisionTreeModel::to_json() const {
    return {{"family", family_name(family())},
            {"width", width_},
            {"max_depth", params_.max_depth},
            {"root", detail::tree_to_json(*root_)}};
}

}  // namespace gamix
