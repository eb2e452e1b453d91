#pragma once

#include <memory>

#include "gamix/classifiers/classifier.hpp"

namespace gamix {

// Binary classification tree with axis-aligned threshold splits chosen by
// Gini impurity reduction. Thresholds sit at midpoints between consecutive
// distinct values; a node becomes a leaf when it is single-class, when no
// candidate split reduces impurity, or at the depth cap. Prediction ties
// break toward the positive class.
struct TreeNode {
    // internal node when feature >= 0, leaf otherwise
    int feature = -1;
    double threshold = 0.0;
    int label = kPositive;  // leaves only
    std::unique_ptr<TreeNode> left;   // rows with value <= threshold
    std::unique_ptr<TreeNode> right;

    bool is_leaf() const { return feature < 0; }
    int depth() const;
};

class DecisionTreeModel final : public Model {
public:
    DecisionTreeModel(std::unique_ptr<TreeNode> root, TreeParams params, std::size_t width)
        : root_(std::move(root)), params_(params), width_(width) {}

    ClassifierFamily family() const override { return ClassifierFamily::decision_tree; }
    std::size_t input_width() const override { return width_; }
    std::vector<int> predict(const Matrix& rows) const override;
    nlohmann::json to_json() const override;

    int predict_row(const double* row) const;
    const TreeNode& root() const { return *root_; }
    const TreeParams& params() const { return params_; }

private:
    std::unique_ptr<TreeNode> root_;
    TreeParams params_;
    std::size_t width_;
};

DecisionTreeModel fit_decision_tree(const Dataset& train, const ClassifierSpec& spec,
                                    std::uint64_t seed);

// Gini impurity of a (positive, total) count pair.
double gini_impurity(std::size_t positives, std::size_t total);

namespace detail {

// Shared between the plain tree and the forest: grows a tree over the rows
// selected by `indices`, considering `features_per_split` random candidate
// features at each node (0 = all features).
std::unique_ptr<TreeNode> grow_tree(const Matrix& X, const std::vector<int>& y,
                                    const std::vector<std::size_t>& indices, int max_depth,
                                    int features_per_split, Rng& rng);

std::unique_ptr<TreeNode> tree_from_json(const nlohmann::json& j);
nlohmann::json tree_to_json(const TreeNode& node);

}  // namespace detail

}  // namespace gamix
