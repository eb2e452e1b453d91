#include "gamix/classifiers/svm.hpp"

#include <cmath>
#include <deque>
#include <unordered_map>

namespace gamix {

double rbf_kernel(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b, double gamma) {
    return std::exp(-gamma * (a - b).squaredNorm());
}

namespace {

// Kernel rows on demand. Small problems keep every row; large ones keep a
// bounded FIFO of recently used rows.
class KernelCache {
public:
    KernelCache(const Matrix& X, double gamma)
        : X_(X), gamma_(gamma), n_(X.rows()), sq_norms_(X.rowwise().squaredNorm()) {
        keep_all_ = n_ <= 2048;
        if (!keep_all_) capacity_ = 192;
        rows_.resize(static_cast<std::size_t>(n_));
    }

    const Eigen::VectorXd& row(Eigen::Index i) {
        auto& slot = rows_[static_cast<std::size_t>(i)];
        if (slot.size() == 0) {
            slot = (-gamma_ *
                    ((sq_norms_.array() + sq_norms_(i)) - 2.0 * (X_ * X_.row(i).transpose()).array()))
                       .exp()
                       .matrix();
            if (!keep_all_) {
                fifo_.push_back(i);
                if (fifo_.size() > capacity_) {
                    rows_[static_cast<std::size_t>(fifo_.front())].resize(0);
                    fifo_.pop_front();
                }
            }
        }
        return slot;
    }

private:
    const Matrix& X_;
    double gamma_;
    Eigen::Index n_;
    Eigen::VectorXd sq_norms_;
    bool keep_all_;
    std::size_t capacity_ = 0;
    std::vector<Eigen::VectorXd> rows_;
    std::deque<Eigen::Index> fifo_;
};

struct Smo {
    const Matrix& X;
    const std::vector<double>& y;  // -1 / +1
    const SvmParams& p;
    KernelCache kernel;
    Eigen::VectorXd alpha;
    Eigen::VectorXd errors;  // E_i = f(x_i) - y_i
    double b = 0.0;
    long long pair_updates = 0;
    Rng rng;

    Smo(const Matrix& X_, const std::vector<double>& y_, const SvmParams& p_, std::uint64_t seed)
        : X(X_), y(y_), p(p_), kernel(X_, p_.gamma),
          alpha(Eigen::VectorXd::Zero(X_.rows())), errors(X_.rows()),
          rng(derive_seed(seed, 0x53f0u)) {
        for (Eigen::Index i = 0; i < X.rows(); ++i) errors(i) = -y[static_cast<std::size_t>(i)];
    }

    bool non_bound(Eigen::Index i) const {
        return alpha(i) > 0.0 && alpha(i) < p.c;
    }

    bool take_step(Eigen::Index i1, Eigen::Index i2) {
        if (i1 == i2) return false;
        const double a1 = alpha(i1), a2 = alpha(i2);
        const double y1 = y[static_cast<std::size_t>(i1)], y2 = y[static_cast<std::size_t>(i2)];
        const double e1 = errors(i1), e2 = errors(i2);
        const double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(p.c, p.c + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - p.c);
            hi = std::min(p.c, a1 + a2);
        }
        if (lo >= hi) return false;

        const Eigen::VectorXd& k1 = kernel.row(i1);
        const double k11 = k1(i1), k12 = k1(i2);
        const Eigen::VectorXd& k2 = kernel.row(i2);
        const double k22 = k2(i2);
        const double eta = k11 + k22 - 2.0 * k12;

        double a2_new;
        if (eta > 0.0) {
            a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
        } else {
            // flat direction: compare the dual objective at both ends
            const double f1 = y1 * (e1 + b) - a1 * k11 - s * a2 * k12;
            const double f2 = y2 * (e2 + b) - s * a1 * k12 - a2 * k22;
            const double l1 = a1 + s * (a2 - lo);
            const double h1 = a1 + s * (a2 - hi);
            const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 +
                                  0.5 * lo * lo * k22 + s * lo * l1 * k12;
            const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 +
                                  0.5 * hi * hi * k22 + s * hi * h1 * k12;
            if (obj_lo < obj_hi - 1e-12)
                a2_new = lo;
            else if (obj_lo > obj_hi + 1e-12)
                a2_new = hi;
            else
                return false;
        }
        if (std::abs(a2_new - a2) < 1e-9 * (a2_new + a2 + 1e-9)) return false;

        double a1_new = a1 + s * (a2 - a2_new);
        if (a1_new < 0.0) {
            a2_new += s * a1_new;
            a1_new = 0.0;
        } else if (a1_new > p.c) {
            a2_new += s * (a1_new - p.c);
            a1_new = p.c;
        }

        const double d1 = y1 * (a1_new - a1);
        const double d2 = y2 * (a2_new - a2);
        const double b1 = b - e1 - d1 * k11 - d2 * k12;
        const double b2 = b - e2 - d1 * k12 - d2 * k22;
        double b_new;
        if (a1_new > 0.0 && a1_new < p.c)
            b_new = b1;
        else if (a2_new > 0.0 && a2_new < p.c)
            b_new = b2;
        else
            b_new = 0.5 * (b1 + b2);

        errors += d1 * k1 + d2 * k2;
        errors.array() += b_new - b;

        alpha(i1) = a1_new;
        alpha(i2) = a2_new;
        b = b_new;
        ++pair_updates;
        return true;
    }

    bool examine(Eigen::Index i2) {
        const double y2 = y[static_cast<std::size_t>(i2)];
        const double a2 = alpha(i2);
        const double e2 = errors(i2);
        const double r2 = e2 * y2;
        const auto n = X.rows();

        if (!((r2 < -p.kkt_tolerance && a2 < p.c) || (r2 > p.kkt_tolerance && a2 > 0.0)))
            return false;

        // second-choice heuristic: largest |E1 - E2| among non-bound points
        Eigen::Index best = -1;
        double best_gap = -1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i2 || !non_bound(j)) continue;
            const double gap = std::abs(errors(j) - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = j;
            }
        }
        if (best >= 0 && take_step(best, i2)) return true;

        std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
        const Eigen::Index start1 = pick(rng);
        for (Eigen::Index k = 0; k < n; ++k) {
            const Eigen::Index j = (start1 + k) % n;
            if (non_bound(j) && take_step(j, i2)) return true;
        }
        const Eigen::Index start2 = pick(rng);
        for (Eigen::Index k = 0; k < n; ++k) {
            const Eigen::Index j = (start2 + k) % n;
            if (take_step(j, i2)) return true;
        }
        return false;
    }
};

}  // namespace

SvmSolution solve_svm_dual(const Dataset& train, const SvmParams& params, std::uint64_t seed) {
    train.check();
    if (train.count_label(kPositive) == 0 || train.count_label(kNegative) == 0)
        throw DataError("SVM needs both classes in the training set");

    std::vector<double> y(train.size());
    for (std::size_t i = 0; i < train.size(); ++i)
        y[i] = train.labels[i] == kPositive ? 1.0 : -1.0;

    Smo smo(train.rows, y, params, seed);
    const auto n = train.rows.rows();

    bool examine_all = true;
    int changed = 0;
    while (changed > 0 || examine_all) {
        changed = 0;
        if (examine_all) {
            for (Eigen::Index i = 0; i < n; ++i) changed += smo.examine(i);
        } else {
            for (Eigen::Index i = 0; i < n; ++i)
                if (smo.non_bound(i)) changed += smo.examine(i);
        }
        if (smo.pair_updates > params.max_pair_updates) {
            SvmSolution partial{smo.alpha, smo.b, smo.pair_updates};
            const double violation = svm_kkt_violation(train, params, partial);
            throw ConvergenceError(
                "SMO hit the pair-update cap (" + std::to_string(params.max_pair_updates) +
                    ") with KKT violation " + std::to_string(violation),
                violation);
        }
        if (examine_all)
            examine_all = false;
        else if (changed == 0)
            examine_all = true;
    }
    return SvmSolution{std::move(smo.alpha), smo.b, smo.pair_updates};
}

double svm_kkt_violation(const Dataset& train, const SvmParams& params,
                         const SvmSolution& solution) {
    const auto n = train.rows.rows();
    Eigen::VectorXd coef(n);
    for (Eigen::Index i = 0; i < n; ++i)
        coef(i) = solution.alphas(i) *
                  (train.labels[static_cast<std::size_t>(i)] == kPositive ? 1.0 : -1.0);

    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double f = solution.bias;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (coef(j) == 0.0) continue;
            f += coef(j) * rbf_kernel(train.rows.row(j), train.rows.row(i), params.gamma);
        }
        const double yf = (train.labels[static_cast<std::size_t>(i)] == kPositive ? 1.0 : -1.0) * f;
        const double a = solution.alphas(i);
        double v;
        if (a <= 1e-12)
            v = std::max(0.0, 1.0 - yf);
        else if (a >= params.c - 1e-12)
            v = std::max(0.0, yf - 1.0);
        else
            v = std::abs(yf - 1.0);
        worst = std::max(worst, v);
    }
    return worst;
}

SvmModel fit_svm(const Dataset& train, const ClassifierSpec& spec, std::uint64_t seed) {
    const SvmSolution sol = solve_svm_dual(train, spec.svm, seed);

    std::vector<Eigen::Index> sv;
    for (Eigen::Index i = 0; i < sol.alphas.size(); ++i)
        if (sol.alphas(i) > 1e-12) sv.push_back(i);

    Matrix vectors(static_cast<Eigen::Index>(sv.size()), train.rows.cols());
    Eigen::VectorXd coefs(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t k = 0; k < sv.size(); ++k) {
        vectors.row(static_cast<Eigen::Index>(k)) = train.rows.row(sv[k]);
        coefs(static_cast<Eigen::Index>(k)) =
            sol.alphas(sv[k]) *
            (train.labels[static_cast<std::size_t>(sv[k])] == kPositive ? 1.0 : -1.0);
    }
    return SvmModel(std::move(vectors), std::move(coefs), sol.bias, spec.svm);
}

double SvmModel::decision_value(const Eigen::RowVectorXd& row) const {
    double f = bias_;
    for (Eigen::Index i = 0; i < support_vectors_.rows(); ++i)
        f += dual_coefs_(i) * rbf_kernel(support_vectors_.row(i), row, params_.gamma);
    return f;
}

std::vector<int> SvmModel::predict(const Matrix& rows) const {
    check_width(rows);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(rows.rows()));
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
        out.push_back(decision_value(rows.row(i)) >= 0.0 ? kPositive : kNegative);
    return out;
}

nlohmann::json SvmModel::to_json() const {
    nlohmann::json vectors = nlohmann::json::array();
    for (Eigen::Index i = 0; i < support_vectors_.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < support_vectors_.cols(); ++j)
            row.push_back(support_vectors_(i, j));
        vectors.push_back(std::move(row));
    }
    nlohmann::json coefs = nlohmann::json::array();
    for (Eigen::Index i = 0; i < dual_coefs_.size(); ++i) coefs.push_back(dual_coefs_(i));
    return {{"family", family_name(family())},
            {"width", input_width()},
            {"gamma", params_.gamma},
            {"c", params_.c},
            {"bias", bias_},
            {"support_vectors", std::move(vectors)},
            {"dual_coefs", std::move(coefs)}};
}

}  // namespace gamix
