#include "gamix/classifiers/classifier.hpp"

#include "gamix/classifiers/decision_tree.hpp"
#include "gamix/classifiers/gaussian_nb.hpp"
#include "gamix/classifiers/mlp.hpp"
#include "gamix/classifiers/random_forest.hpp"
#include "gamix/classifiers/svm.hpp"

namespace gamix {

std::string family_name(ClassifierFamily f) {
    switch (f) {
        case ClassifierFamily::mlp: return "mlp";
        case ClassifierFamily::svm: return "svm";
        case ClassifierFamily::decision_tree: return "decision_tree";
        case ClassifierFamily::gaussian_nb: return "gaussian_nb";
        case ClassifierFamily::random_forest: return "random_forest";
    }
    throw ConfigError("unknown classifier family");
}

ClassifierFamily family_from_name(const std::string& name) {
    if (name == "mlp" || name == "ann") return ClassifierFamily::mlp;
    if (name == "svm") return ClassifierFamily::svm;
    if (name == "decision_tree") return ClassifierFamily::decision_tree;
    if (name == "gaussian_nb" || name == "bayes") return ClassifierFamily::gaussian_nb;
    if (name == "random_forest") return ClassifierFamily::random_forest;
    throw ConfigError("unknown classifier family: " + name);
}

void Model::check_width(const Matrix& rows) const {
    if (static_cast<std::size_t>(rows.cols()) != input_width())
        throw DataError("model expects " + std::to_string(input_width()) +
                        " features, got " + std::to_string(rows.cols()));
}

std::unique_ptr<Model> fit_model(const ClassifierSpec& spec, const Dataset& train,
                                 std::uint64_t seed) {
    switch (spec.family) {
        case ClassifierFamily::mlp:
            return std::make_unique<MlpModel>(fit_mlp(train, spec, seed));
        case ClassifierFamily::svm:
            return std::make_unique<SvmModel>(fit_svm(train, spec, seed));
        case ClassifierFamily::decision_tree:
            return std::make_unique<DecisionTreeModel>(fit_decision_tree(train, spec, seed));
        case ClassifierFamily::gaussian_nb:
            return std::make_unique<GaussianNbModel>(fit_gaussian_nb(train, spec));
        case ClassifierFamily::random_forest:
            return std::make_unique<RandomForestModel>(fit_random_forest(train, spec, seed));
    }
    throw ConfigError("unknown classifier family");
}

namespace {

Matrix matrix_from_json(const nlohmann::json& j) {
    const auto r = static_cast<Eigen::Index>(j.size());
    const auto c = r > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index k = 0; k < c; ++k)
            m(i, k) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
    return m;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

}  // namespace

std::unique_ptr<Model> model_from_json(const nlohmann::json& j) {
    const auto family = family_from_name(j.at("family").get<std::string>());
    const auto width = j.at("width").get<std::size_t>();

    switch (family) {
        case ClassifierFamily::decision_tree: {
            TreeParams params{.max_depth = j.at("max_depth").get<int>()};
            return std::make_unique<DecisionTreeModel>(detail::tree_from_json(j.at("root")),
                                                       params, width);
        }
        case ClassifierFamily::random_forest: {
            ForestParams params;
            params.n_estimators = j.at("n_estimators").get<int>();
            params.max_depth = j.at("max_depth").get<int>();
            params.features_per_split = j.at("features_per_split").get<int>();
            params.bootstrap = j.at("bootstrap").get<bool>();
            std::vector<std::unique_ptr<TreeNode>> trees;
            for (const auto& t : j.at("trees")) trees.push_back(detail::tree_from_json(t));
            return std::make_unique<RandomForestModel>(std::move(trees), params, width);
        }
        case ClassifierFamily::gaussian_nb: {
            NbParams params{.variance_floor = j.at("variance_floor").get<double>()};
            auto priors = j.at("priors").get<std::array<double, 2>>();
            return std::make_unique<GaussianNbModel>(priors, matrix_from_json(j.at("means")),
                                                     matrix_from_json(j.at("stddevs")), params);
        }
        case ClassifierFamily::mlp: {
            MlpParams params;
            Matrix w1 = matrix_from_json(j.at("w1"));
            params.hidden1 = static_cast<int>(w1.rows());
            params.hidden2 = static_cast<int>(j.at("w2").size());
            auto model = std::make_unique<MlpModel>(static_cast<int>(width), params, 0);
            model->w1 = std::move(w1);
            model->w2 = matrix_from_json(j.at("w2"));
            model->w3 = matrix_from_json(j.at("w3"));
            model->b1 = vector_from_json(j.at("b1"));
            model->b2 = vector_from_json(j.at("b2"));
            model->b3 = vector_from_json(j.at("b3"));
            return model;
        }
        case ClassifierFamily::svm: {
            SvmParams params;
            params.gamma = j.at("gamma").get<double>();
            params.c = j.at("c").get<double>();
            return std::make_unique<SvmModel>(matrix_from_json(j.at("support_vectors")),
                                              vector_from_json(j.at("dual_coefs")),
                                              j.at("bias").get<double>(), params);
        }
    }
    throw ConfigError("unknown classifier family in model JSON");
}

}  // namespace gamix
