#pragma once

#include "gamix/classifiers/classifier.hpp"

namespace gamix {

// Soft-margin RBF support vector machine. The dual is solved by sequential
// two-coordinate ascent (SMO) to a KKT tolerance; dual coefficients stay in
// [0, C]. The sign of the decision function picks the class, zero breaking
// toward positive.
class SvmModel final : public Model {
public:
    SvmModel(Matrix support_vectors, Eigen::VectorXd dual_coefs, double bias,
             SvmParams params)
        : support_vectors_(std::move(support_vectors)), dual_coefs_(std::move(dual_coefs)),
          bias_(bias), params_(params) {}

    ClassifierFamily family() const override { return ClassifierFamily::svm; }
    std::size_t input_width() const override {
        return static_cast<std::size_t>(support_vectors_.cols());
    }
    std::vector<int> predict(const Matrix& rows) const override;
    nlohmann::json to_json() const override;

    double decision_value(const Eigen::RowVectorXd& row) const;
    std::size_t support_vector_count() const {
        return static_cast<std::size_t>(support_vectors_.rows());
    }
    const Matrix& support_vectors() const { return support_vectors_; }
    const Eigen::VectorXd& dual_coefs() const { return dual_coefs_; }  // alpha_i * y_i
    double bias() const { return bias_; }

private:
    Matrix support_vectors_;
    Eigen::VectorXd dual_coefs_;
    double bias_;
    SvmParams params_;
};

// Full dual solution over the training rows, for inspection and KKT checks.
struct SvmSolution {
    Eigen::VectorXd alphas;
    double bias = 0.0;
    long long pair_updates = 0;
};

SvmSolution solve_svm_dual(const Dataset& train, const SvmParams& params, std::uint64_t seed);

// Largest KKT violation of a solution, recomputed from scratch.
double svm_kkt_violation(const Dataset& train, const SvmParams& params,
                         const SvmSolution& solution);

SvmModel fit_svm(const Dataset& train, const ClassifierSpec& spec, std::uint64_t seed);

double rbf_kernel(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b, double gamma);

}  // namespace gamix
