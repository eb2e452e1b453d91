#pragma once

#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "gamix/dataset.hpp"

namespace gamix {

enum class ClassifierFamily { mlp, svm, decision_tree, gaussian_nb, random_forest };

std::string family_name(ClassifierFamily f);
ClassifierFamily family_from_name(const std::string& name);

struct MlpParams {
    int hidden1 = 30;
    int hidden2 = 30;
    double learning_rate = 0.01;
    int epochs = 200;
    int batch_size = 32;  // 0 = full batch
};

struct SvmParams {
    double c = 100.0;
    double gamma = 1.0;
    double kkt_tolerance = 1e-3;
    long long max_pair_updates = 100000;
};

struct TreeParams {
    int max_depth = 9;  // 0 = unbounded
};

struct NbParams {
    double variance_floor = 1e-9;
};

struct ForestParams {
    int n_estimators = 100;
    int max_depth = 0;          // 0 = unbounded
    int features_per_split = 0; // 0 = ceil(sqrt(width))
    bool bootstrap = true;      // test hook; production forests always bootstrap
};

// Family tag plus per-family hyperparameters; defaults reproduce the
// reference settings (mlp 11-30-30-2; svm C=100 gamma=1; tree depth 9;
// forest 100 trees; nb variance floor 1e-9).
struct ClassifierSpec {
    ClassifierFamily family = ClassifierFamily::decision_tree;
    MlpParams mlp;
    SvmParams svm;
    TreeParams tree;
    NbParams nb;
    ForestParams forest;

    static ClassifierSpec make(ClassifierFamily f) { return ClassifierSpec{.family = f}; }
};

// Uniform predict contract over the five families. Trained models are
// immutable and safe for concurrent predict calls.
class Model {
public:
    virtual ~Model() = default;
    virtual ClassifierFamily family() const = 0;
    virtual std::size_t input_width() const = 0;
    virtual std::vector<int> predict(const Matrix& rows) const = 0;
    virtual nlohmann::json to_json() const = 0;

protected:
    void check_width(const Matrix& rows) const;
};

// Trains the family selected by spec.family. Deterministic given seed.
std::unique_ptr<Model> fit_model(const ClassifierSpec& spec, const Dataset& train,
                                 std::uint64_t seed);

std::unique_ptr<Model> model_from_json(const nlohmann::json& j);

inline std::vector<int> predict(const Model& model, const Matrix& rows) {
    return model.predict(rows);
}

}  // namespace gamix
