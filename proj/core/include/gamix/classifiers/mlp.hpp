#pragma once

#include "gamix/classifiers/classifier.hpp"

namespace gamix {

// Fully connected in->hidden1->hidden2->2 network, tanh hidden activations
// and softmax output, trained with mini-batch gradient descent on
// cross-entropy. Deterministic given the seed.
class MlpModel final : public Model {
public:
    struct Gradients {
        Matrix w1, w2, w3;
        Eigen::VectorXd b1, b2, b3;
    };

    // weights: (out x in) per layer
    Matrix w1, w2, w3;
    Eigen::VectorXd b1, b2, b3;
    std::vector<double> loss_history;  // mean training loss per epoch

    MlpModel(int input, const MlpParams& params, std::uint64_t seed);

    ClassifierFamily family() const override { return ClassifierFamily::mlp; }
    std::size_t input_width() const override { return static_cast<std::size_t>(w1.cols()); }
    std::vector<int> predict(const Matrix& rows) const override;
    nlohmann::json to_json() const override;

    // Row-wise class probabilities (each row sums to 1).
    Matrix predict_proba(const Matrix& rows) const;

    // Mean cross-entropy over the batch and its analytic parameter gradients.
    std::pair<double, Gradients> loss_and_gradients(const Matrix& X,
                                                    const std::vector<int>& y) const;

    const MlpParams& params() const { return params_; }

private:
    MlpParams params_;
};

MlpModel fit_mlp(const Dataset& train, const ClassifierSpec& spec, std::uint64_t seed);

}  // namespace gamix
