#include "gamix/classifiers/random_forest.hpp"

#include <cmath>
#include <numeric>

namespace gamix {

RandomForestModel fit_random_forest(const Dataset& train, const ClassifierSpec& spec,
                                    std::uint64_t seed) {
    train.check();
    if (train.size() == 0) throw DataError("cannot fit a random forest on an empty dataset");
    const ForestParams& p = spec.forest;
    if (p.n_estimators < 1) throw ConfigError("random forest needs at least one tree");

    int features = p.features_per_split;
    if (features == 0)
        features = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(train.width()))));
    if (features >= static_cast<int>(train.width())) features = 0;  // 0 = all, no sampling

    const std::size_t n = train.size();
    std::vector<std::unique_ptr<TreeNode>> trees;
    trees.reserve(static_cast<std::size_t>(p.n_estimators));

    for (int t = 0; t < p.n_estimators; ++t) {
        Rng rng(derive_seed(seed, 0xf03e5u, t));
        std::vector<std::size_t> sample(n);
        if (p.bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (auto& s : sample) s = pick(rng);
        } else {
            std::iota(sample.begin(), sample.end(), std::size_t{0});
        }
        trees.push_back(
            detail::grow_tree(train.rows, train.labels, sample, p.max_depth, features, rng));
    }
    return RandomForestModel(std::move(trees), p, train.width());
}

std::vector<int> RandomForestModel::predict(const Matrix& rows) const {
    check_width(rows);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(rows.rows()));
    std::vector<double> buf(static_cast<std::size_t>(rows.cols()));
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows.cols(); ++j) buf[static_cast<std::size_t>(j)] = rows(i, j);
        std::size_t votes_pos = 0;
        for (const auto& tree : trees_) {
            const TreeNode* node = tree.get();
            while (!node->is_leaf())
                node = (buf[static_cast<std::size_t>(node->feature)] <= node->threshold)
                           ? node->left.get()
                           : node->right.get();
            votes_pos += static_cast<std::size_t>(node->label == kPositive);
        }
        out.push_back(2 * votes_pos >= trees_.size() ? kPositive : kNegative);
    }
    return out;
}

nlohmann::json RandomForestModel::to_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) trees.push_back(detail::tree_to_json(*t));
    return {{"family", family_name(family())},
            {"width", width_},
            {"n_estimators", params_.n_estimators},
            {"max_depth", params_.max_depth},
            {"features_per_split", params_.features_per_split},
            {"bootstrap", params_.bootstrap},
            {"trees", std::move(trees)}};
}

}  // namespace gamix
