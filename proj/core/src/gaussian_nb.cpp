#include "gamix/classifiers/gaussian_nb.hpp"

#include <cmath>
#include <numbers>

namespace gamix {

double gaussian_density(double x, double mean, double stddev) {
    const double z = (x - mean) / stddev;
    return std::exp(-0.5 * z * z) / (stddev * std::sqrt(2.0 * std::numbers::pi));
}

GaussianNbModel fit_gaussian_nb(const Dataset& train, const ClassifierSpec& spec) {
    train.check();
    const std::size_t n_pos = train.count_label(kPositive);
    const std::size_t n_neg = train.count_label(kNegative);
    if (n_pos == 0 || n_neg == 0)
        throw DataError("gaussian naive Bayes needs both classes in the training set");

    const auto d = train.rows.cols();
    Matrix means = Matrix::Zero(2, d);
    Matrix stddevs = Matrix::Zero(2, d);
    const double floor = spec.nb.variance_floor;

    for (int cls : {kNegative, kPositive}) {
        const auto idx = train.indices_of(cls);
        const double nc = static_cast<double>(idx.size());
        for (Eigen::Index j = 0; j < d; ++j) {
            double sum = 0.0;
            for (auto i : idx) sum += train.rows(static_cast<Eigen::Index>(i), j);
            const double mu = sum / nc;
            double ss = 0.0;
            for (auto i : idx) {
                const double v = train.rows(static_cast<Eigen::Index>(i), j) - mu;
                ss += v * v;
            }
            means(cls, j) = mu;
            stddevs(cls, j) = std::sqrt(std::max(ss / nc, floor));
        }
    }

    const double n = static_cast<double>(train.size());
    std::array<double, 2> priors{static_cast<double>(n_neg) / n,
                                 static_cast<double>(n_pos) / n};
    return GaussianNbModel(priors, std::move(means), std::move(stddevs), spec.nb);
}

std::array<double, 2> GaussianNbModel::log_posteriors(const Eigen::RowVectorXd& row) const {
    // stays in the log domain: exponentiating first would underflow for
    // values far outside a floored-variance feature
    static const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
    std::array<double, 2> out{};
    for (int cls : {kNegative, kPositive}) {
        double lp = std::log(priors_[static_cast<std::size_t>(cls)]);
        for (Eigen::Index j = 0; j < means_.cols(); ++j) {
            const double z = (row(j) - means_(cls, j)) / stddevs_(cls, j);
            lp += -std::log(stddevs_(cls, j)) - kLogSqrt2Pi - 0.5 * z * z;
        }
        out[static_cast<std::size_t>(cls)] = lp;
    }
    return out;
}

std::vector<int> GaussianNbModel::predict(const Matrix& rows) const {
    check_width(rows);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(rows.rows()));
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const auto lp = log_posteriors(rows.row(i));
        out.push_back(lp[kPositive] >= lp[kNegative] ? kPositive : kNegative);
    }
    return out;
}

nlohmann::json GaussianNbModel::to_json() const {
    auto matrix_json = [](const Matrix& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    return {{"family", family_name(family())},
            {"width", input_width()},
            {"priors", priors_},
            {"means", matrix_json(means_)},
            {"stddevs", matrix_json(stddevs_)},
            {"variance_floor", params_.variance_floor}};
}

}  // namespace gamix
