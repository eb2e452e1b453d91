#pragma once

#include "gamix/classifiers/decision_tree.hpp"

namespace gamix {

// Bagging ensemble of Gini trees. Each tree fits a bootstrap resample of the
// training set (same size, with replacement) and considers ceil(sqrt(width))
// random candidate features per split. Prediction is the majority vote;
// ties break toward the positive class.
class RandomForestModel final : public Model {
public:
    RandomForestModel(std::vector<std::unique_ptr<TreeNode>> trees, ForestParams params,
                      std::size_t width)
        : trees_(std::move(trees)), params_(params), width_(width) {}

    ClassifierFamily family() const override { return ClassifierFamily::random_forest; }
    std::size_t input_width() const override { return width_; }
    std::vector<int> predict(const Matrix& rows) const override;
    nlohmann::json to_json() const override;

    std::size_t tree_count() const { return trees_.size(); }
    const TreeNode& tree(std::size_t i) const { return *trees_[i]; }

private:
    std::vector<std::unique_ptr<TreeNode>> trees_;
    ForestParams params_;
    std::size_t width_;
};

RandomForestModel fit_random_forest(const Dataset& train, const ClassifierSpec& spec,
                                    std::uint64_t seed);

}  // namespace gamix
