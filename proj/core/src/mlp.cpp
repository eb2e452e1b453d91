#include "gamix/classifiers/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gamix {

namespace {

Matrix glorot_uniform(int out, int in, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> u(-limit, limit);
    Matrix m(out, in);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = u(rng);
    return m;
}

Matrix softmax_rows(Matrix z) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const double mx = z.row(i).maxCoeff();
        z.row(i) = (z.row(i).array() - mx).exp();
        z.row(i) /= z.row(i).sum();
    }
    return z;
}

struct Forward {
    Matrix a1, a2, probs;
};

Forward forward_pass(const MlpModel& m, const Matrix& X) {
    Forward f;
    f.a1 = ((X * m.w1.transpose()).rowwise() + m.b1.transpose()).array().tanh();
    f.a2 = ((f.a1 * m.w2.transpose()).rowwise() + m.b2.transpose()).array().tanh();
    f.probs = softmax_rows((f.a2 * m.w3.transpose()).rowwise() + m.b3.transpose());
    return f;
}

}  // namespace

MlpModel::MlpModel(int input, const MlpParams& params, std::uint64_t seed) {
    params_ = params;
    Rng rng(derive_seed(seed, 0x313Cu));
    w1 = glorot_uniform(params.hidden1, input, rng);
    w2 = glorot_uniform(params.hidden2, params.hidden1, rng);
    w3 = glorot_uniform(2, params.hidden2, rng);
    b1 = Eigen::VectorXd::Zero(params.hidden1);
    b2 = Eigen::VectorXd::Zero(params.hidden2);
    b3 = Eigen::VectorXd::Zero(2);
}

std::pair<double, MlpModel::Gradients> MlpModel::loss_and_gradients(
    const Matrix& X, const std::vector<int>& y) const {
    const auto n = X.rows();
    const Forward f = forward_pass(*this, X);

    double loss = 0.0;
    Matrix dz3 = f.probs;  // (P - Y) / n
    for (Eigen::Index i = 0; i < n; ++i) {
        loss -= std::log(std::max(f.probs(i, y[static_cast<std::size_t>(i)]), 1e-300));
        dz3(i, y[static_cast<std::size_t>(i)]) -= 1.0;
    }
    loss /= static_cast<double>(n);
    dz3 /= static_cast<double>(n);

    Gradients g;
    g.w3 = dz3.transpose() * f.a2;
    g.b3 = dz3.colwise().sum().transpose();
    Matrix dz2 = (dz3 * w3).array() * (1.0 - f.a2.array().square());
    g.w2 = dz2.transpose() * f.a1;
    g.b2 = dz2.colwise().sum().transpose();
    Matrix dz1 = (dz2 * w2).array() * (1.0 - f.a1.array().square());
    g.w1 = dz1.transpose() * X;
    g.b1 = dz1.colwise().sum().transpose();
    return {loss, std::move(g)};
}

MlpModel fit_mlp(const Dataset& train, const ClassifierSpec& spec, std::uint64_t seed) {
    train.check();
    if (train.size() == 0) throw DataError("cannot fit an MLP on an empty dataset");

    MlpModel model(static_cast<int>(train.width()), spec.mlp, seed);
    const MlpParams& p = spec.mlp;
    const std::size_t n = train.size();
    const std::size_t batch =
        p.batch_size <= 0 ? n : std::min<std::size_t>(static_cast<std::size_t>(p.batch_size), n);

    Rng rng(derive_seed(seed, 0x0e90c5u));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < p.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t count = std::min(batch, n - start);
            Matrix X(static_cast<Eigen::Index>(count), train.rows.cols());
            std::vector<int> y(count);
            for (std::size_t k = 0; k < count; ++k) {
                X.row(static_cast<Eigen::Index>(k)) =
                    train.rows.row(static_cast<Eigen::Index>(order[start + k]));
                y[k] = train.labels[order[start + k]];
            }
            auto [loss, g] = model.loss_and_gradients(X, y);
            if (!std::isfinite(loss))
                throw TrainingError("MLP loss diverged at epoch " + std::to_string(epoch), epoch);
            epoch_loss += loss * static_cast<double>(count);

            model.w1 -= p.learning_rate * g.w1;
            model.w2 -= p.learning_rate * g.w2;
            model.w3 -= p.learning_rate * g.w3;
            model.b1 -= p.learning_rate * g.b1;
            model.b2 -= p.learning_rate * g.b2;
            model.b3 -= p.learning_rate * g.b3;
        }
        model.loss_history.push_back(epoch_loss / static_cast<double>(n));
    }
    return model;
}

Matrix MlpModel::predict_proba(const Matrix& rows) const {
    check_width(rows);
    return forward_pass(*this, rows).probs;
}

std::vector<int> MlpModel::predict(const Matrix& rows) const {
    const Matrix probs = predict_proba(rows);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(rows.rows()));
    for (Eigen::Index i = 0; i < probs.rows(); ++i)
        out.push_back(probs(i, kPositive) >= probs(i, kNegative) ? kPositive : kNegative);
    return out;
}

nlohmann::json MlpModel::to_json() const {
    auto mat = [](const Matrix& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    auto vec = [](const Eigen::VectorXd& v) {
        nlohmann::json out = nlohmann::json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
        return out;
    };
    return {{"family", family_name(family())},
            {"width", input_width()},
            {"w1", mat(w1)}, {"b1", vec(b1)},
            {"w2", mat(w2)}, {"b2", vec(b2)},
            {"w3", mat(w3)}, {"b3", vec(b3)}};
}

}  // namespace gamix
