#pragma once

#include <array>

#include "gamix/classifiers/classifier.hpp"

namespace gamix {

// Gaussian naive Bayes: per class and feature the likelihood is a normal
// density with the class-conditional mean and (variance-floored) stddev.
// Prediction is the argmax of log prior + sum of log densities; ties break
// toward the positive class.
class GaussianNbModel final : public Model {
public:
    GaussianNbModel(std::array<double, 2> priors, Matrix means, Matrix stddevs,
                    NbParams params)
        : priors_(priors), means_(std::move(means)), stddevs_(std::move(stddevs)),
          params_(params) {}

    ClassifierFamily family() const override { return ClassifierFamily::gaussian_nb; }
    std::size_t input_width() const override { return static_cast<std::size_t>(means_.cols()); }
    std::vector<int> predict(const Matrix& rows) const override;
    nlohmann::json to_json() const override;

    // log P(class) + sum_i log P(x_i | class), per class
    std::array<double, 2> log_posteriors(const Eigen::RowVectorXd& row) const;

    const std::array<double, 2>& priors() const { return priors_; }
    double mean(int cls, int feature) const { return means_(cls, feature); }
    double stddev(int cls, int feature) const { return stddevs_(cls, feature); }

private:
    std::array<double, 2> priors_;  // [negative, positive]
    Matrix means_;                  // 2 x d, row index = class label
    Matrix stddevs_;
    NbParams params_;
};

GaussianNbModel fit_gaussian_nb(const Dataset& train, const ClassifierSpec& spec);

// Normal density, the likelihood used per feature.
double gaussian_density(double x, double mean, double stddev);

}  // namespace gamix
