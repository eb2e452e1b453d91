#include "gamix/generators.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numeric>

namespace gamix {

std::string generator_name(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::gaussian_copula: return "gaussian_copula";
        case GeneratorKind::gaussian_mixture: return "gaussian_mixture";
        case GeneratorKind::interpolator: return "interpolator";
        case GeneratorKind::external: return "external";
    }
    throw ConfigError("unknown generator kind");
}

GeneratorKind generator_from_name(const std::string& name) {
    if (name == "gaussian_copula") return GeneratorKind::gaussian_copula;
    if (name == "gaussian_mixture") return GeneratorKind::gaussian_mixture;
    if (name == "interpolator") return GeneratorKind::interpolator;
    if (name == "external") return GeneratorKind::external;
    throw ConfigError("unknown generator kind: " + name);
}

void SyntheticPool::check() const {
    if (rows.cols() == 0) throw DataError("synthetic pool has no feature columns");
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
        for (Eigen::Index j = 0; j < rows.cols(); ++j)
            if (rows(i, j) < -1.0 || rows(i, j) > 1.0 || !std::isfinite(rows(i, j)))
                throw DataError("pool row " + std::to_string(i) + ", feature " +
                                std::to_string(j) + " outside [-1,1]");
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double u) {
    return std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
}

// Cholesky with escalating diagonal jitter; the input is PSD by construction,
// the jitter only absorbs rounding.
Matrix jittered_cholesky(Matrix m) {
    double jitter = 1e-6;
    for (int attempt = 0; attempt < 6; ++attempt) {
        Matrix trial = m;
        trial.diagonal().array() += jitter;
        Eigen::LLT<Matrix> llt(trial);
        if (llt.info() == Eigen::Success) return llt.matrixL();
        jitter *= 10.0;
    }
    throw DataError("covariance decomposition failed despite regularization");
}

void require_minority(const Dataset& minority) {
    minority.check();
    for (int l : minority.labels)
        if (l != kPositive)
            throw DataError("generators fit on minority rows only; found a negative label");
}

GeneratorModel fit_copula(const Dataset& minority) {
    const auto n = minority.rows.rows();
    const auto d = minority.rows.cols();
    GeneratorModel model;
    model.constant_feature.assign(static_cast<std::size_t>(d), false);

    // normal scores from midranks
    Matrix z(n, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        std::vector<std::size_t> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return minority.rows(static_cast<Eigen::Index>(a), j) <
                   minority.rows(static_cast<Eigen::Index>(b), j);
        });
        std::vector<double> sorted(static_cast<std::size_t>(n));
        for (std::size_t k = 0; k < order.size(); ++k)
            sorted[k] = minority.rows(static_cast<Eigen::Index>(order[k]), j);
        model.sorted_values.push_back(sorted);

        std::size_t k = 0;
        while (k < order.size()) {
            std::size_t end = k;
            while (end + 1 < order.size() && sorted[end + 1] == sorted[k]) ++end;
            const double midrank = 0.5 * static_cast<double>(k + end) + 1.0;  // 1-based
            const double u = (midrank - 0.5) / static_cast<double>(n);
            const double score = normal_quantile(u);
            for (std::size_t t = k; t <= end; ++t)
                z(static_cast<Eigen::Index>(order[t]), j) = score;
            k = end + 1;
        }
    }

    model.correlation = Matrix::Identity(d, d);
    Eigen::VectorXd mean = z.colwise().mean();
    Matrix centered = z.rowwise() - mean.transpose();
    Eigen::VectorXd sd = (centered.array().square().colwise().sum() / static_cast<double>(n))
                             .sqrt()
                             .matrix();
    for (Eigen::Index a = 0; a < d; ++a) {
        if (sd(a) == 0.0) {
            model.constant_feature[static_cast<std::size_t>(a)] = true;
            continue;
        }
        for (Eigen::Index b = a + 1; b < d; ++b) {
            if (sd(b) == 0.0) continue;
            const double cov =
                (centered.col(a).array() * centered.col(b).array()).sum() / static_cast<double>(n);
            model.correlation(a, b) = model.correlation(b, a) = cov / (sd(a) * sd(b));
        }
    }
    model.correlation_chol = jittered_cholesky(model.correlation);
    return model;
}

GeneratorModel fit_mixture(const Dataset& minority, int k, std::uint64_t seed) {
    const auto n = minority.rows.rows();
    const auto d = minority.rows.cols();
    GeneratorModel model;

    // k-means with hard assignments, then per-cluster Gaussian moments
    Rng rng(derive_seed(seed, 0x93f7u));
    std::vector<Eigen::Index> center_idx(static_cast<std::size_t>(n));
    std::iota(center_idx.begin(), center_idx.end(), Eigen::Index{0});
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
        std::swap(center_idx[static_cast<std::size_t>(i)],
                  center_idx[static_cast<std::size_t>(pick(rng))]);
    }
    Matrix centers(k, d);
    for (int c = 0; c < k; ++c)
        centers.row(c) = minority.rows.row(center_idx[static_cast<std::size_t>(c)]);

    std::vector<int> assignment(static_cast<std::size_t>(n), 0);
    for (int iter = 0; iter < 25; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (minority.rows.row(i) - centers.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double dist = (minority.rows.row(i) - centers.row(c)).squaredNorm();
                if (dist < best_d) {
                    best_d = dist;
                    best = c;
                }
            }
            if (assignment[static_cast<std::size_t>(i)] != best) {
                assignment[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
        Matrix sums = Matrix::Zero(k, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(assignment[static_cast<std::size_t>(i)]) += minority.rows.row(i);
            ++counts[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0) {
                // reseat an empty cluster on the row farthest from its center
                Eigen::Index far = 0;
                double far_d = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double dist =
                        (minority.rows.row(i) -
                         centers.row(assignment[static_cast<std::size_t>(i)]))
                            .squaredNorm();
                    if (dist > far_d) {
                        far_d = dist;
                        far = i;
                    }
                }
                centers.row(c) = minority.rows.row(far);
                changed = true;
            } else {
                centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            }
        }
        if (!changed) break;
    }

    for (int c = 0; c < k; ++c) {
        std::vector<Eigen::Index> members;
        for (Eigen::Index i = 0; i < n; ++i)
            if (assignment[static_cast<std::size_t>(i)] == c) members.push_back(i);
        if (members.empty()) continue;

        GeneratorModel::Component comp;
        comp.weight = static_cast<double>(members.size()) / static_cast<double>(n);
        comp.mean = Eigen::VectorXd::Zero(d);
        for (auto i : members) comp.mean += minority.rows.row(i).transpose();
        comp.mean /= static_cast<double>(members.size());

        Matrix cov = Matrix::Zero(d, d);
        for (auto i : members) {
            Eigen::VectorXd delta = minority.rows.row(i).transpose() - comp.mean;
            cov += delta * delta.transpose();
        }
        cov /= static_cast<double>(members.size());
        comp.covariance_chol = jittered_cholesky(std::move(cov));
        model.components.push_back(std::move(comp));
    }
    return model;
}

GeneratorModel fit_interpolator(const Dataset& minority, int neighbors) {
    const auto n = minority.rows.rows();
    GeneratorModel model;
    model.stored_rows = minority.rows;
    model.neighbor_count = neighbors;
    model.neighbor_lists.resize(static_cast<std::size_t>(n));

    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<std::pair<double, int>> dist;
        dist.reserve(static_cast<std::size_t>(n) - 1);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            dist.emplace_back((minority.rows.row(i) - minority.rows.row(j)).squaredNorm(),
                              static_cast<int>(j));
        }
        std::partial_sort(dist.begin(), dist.begin() + neighbors, dist.end());
        auto& list = model.neighbor_lists[static_cast<std::size_t>(i)];
        for (int t = 0; t < neighbors; ++t) list.push_back(dist[static_cast<std::size_t>(t)].second);
    }
    return model;
}

}  // namespace

GeneratorModel fit_generator(GeneratorKind kind, const Dataset& minority,
                             const GeneratorConfig& config, std::uint64_t seed) {
    require_minority(minority);
    const auto n = static_cast<long long>(minority.size());

    GeneratorModel model;
    switch (kind) {
        case GeneratorKind::gaussian_copula:
            if (n < 3)
                throw DataError("gaussian_copula needs at least 3 minority rows, got " +
                                std::to_string(n));
            model = fit_copula(minority);
            break;
        case GeneratorKind::gaussian_mixture:
            if (config.mixture_components < 1)
                throw ConfigError("mixture needs at least 1 component");
            if (n < config.mixture_components + 1)
                throw DataError("gaussian_mixture with " +
                                std::to_string(config.mixture_components) +
                                " components needs at least " +
                                std::to_string(config.mixture_components + 1) +
                                " minority rows, got " + std::to_string(n));
            model = fit_mixture(minority, config.mixture_components, seed);
            break;
        case GeneratorKind::interpolator:
            if (config.interpolator_neighbors < 1)
                throw ConfigError("interpolator needs at least 1 neighbor");
            if (n < config.interpolator_neighbors + 1)
                throw DataError("interpolator with k=" +
                                std::to_string(config.interpolator_neighbors) +
                                " needs at least " +
                                std::to_string(config.interpolator_neighbors + 1) +
                                " minority rows, got " + std::to_string(n));
            model = fit_interpolator(minority, config.interpolator_neighbors);
            break;
        case GeneratorKind::external:
            throw ConfigError("external pools are loaded from CSV, not fitted");
    }
    model.kind = kind;
    model.schema = minority.schema;
    model.fitted = true;
    return model;
}

SyntheticPool sample_pool(const GeneratorModel& model, std::size_t n, std::uint64_t seed) {
    if (!model.fitted) throw DataError("cannot sample from an unfit generator");
    if (n == 0) throw DataError("pool size must be at least 1");

    const auto d = static_cast<Eigen::Index>(model.schema.size());
    SyntheticPool pool;
    pool.source = model.kind;
    pool.provenance = "sampled from " + generator_name(model.kind);
    pool.rows.resize(static_cast<Eigen::Index>(n), d);

    Rng rng(derive_seed(seed, 0xb001u, static_cast<int>(model.kind)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    switch (model.kind) {
        case GeneratorKind::gaussian_copula: {
            Eigen::VectorXd eps(d);
            for (std::size_t i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < d; ++j) eps(j) = gauss(rng);
                Eigen::VectorXd z = model.correlation_chol * eps;
                for (Eigen::Index j = 0; j < d; ++j) {
                    const auto& sorted = model.sorted_values[static_cast<std::size_t>(j)];
                    double value;
                    if (model.constant_feature[static_cast<std::size_t>(j)]) {
                        value = sorted.front();
                    } else {
                        const double u = normal_cdf(z(j));
                        const double pos = u * static_cast<double>(sorted.size() - 1);
                        const auto lo = static_cast<std::size_t>(pos);
                        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
                        value = sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - static_cast<double>(lo));
                    }
                    pool.rows(static_cast<Eigen::Index>(i), j) = clamp_unit(value);
                }
            }
            break;
        }
        case GeneratorKind::gaussian_mixture: {
            Eigen::VectorXd eps(d);
            for (std::size_t i = 0; i < n; ++i) {
                double pick = unit(rng);
                std::size_t c = 0;
                for (; c + 1 < model.components.size(); ++c) {
                    pick -= model.components[c].weight;
                    if (pick <= 0.0) break;
                }
                const auto& comp = model.components[c];
                for (Eigen::Index j = 0; j < d; ++j) eps(j) = gauss(rng);
                Eigen::VectorXd x = comp.mean + comp.covariance_chol * eps;
                for (Eigen::Index j = 0; j < d; ++j)
                    pool.rows(static_cast<Eigen::Index>(i), j) = clamp_unit(x(j));
            }
            break;
        }
        case GeneratorKind::interpolator: {
            const auto m = model.stored_rows.rows();
            std::uniform_int_distribution<Eigen::Index> pick_row(0, m - 1);
            std::uniform_int_distribution<int> pick_nn(0, model.neighbor_count - 1);
            for (std::size_t i = 0; i < n; ++i) {
                const Eigen::Index a = pick_row(rng);
                const int b = model.neighbor_lists[static_cast<std::size_t>(a)]
                                                  [static_cast<std::size_t>(pick_nn(rng))];
                const double lambda = unit(rng);
                for (Eigen::Index j = 0; j < d; ++j) {
                    const double va = model.stored_rows(a, j);
                    const double vb = model.stored_rows(b, j);
                    pool.rows(static_cast<Eigen::Index>(i), j) =
                        clamp_unit(va + lambda * (vb - va));
                }
            }
            break;
        }
        case GeneratorKind::external:
            throw DataError("cannot sample from the external kind");
    }
    pool.check();
    return pool;
}

SyntheticPool load_external_pool(const std::string& path, const FeatureSchema& schema) {
    Dataset ds = read_feature_csv(path, schema, false);
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
        if (ds.labels[i] != kPositive)
            throw DataError("external pool row " + std::to_string(i + 1) +
                            " has a negative-class label; pools hold minority rows only");
    SyntheticPool pool;
    pool.rows = std::move(ds.rows);
    pool.source = GeneratorKind::external;
    pool.provenance = "loaded from " + path;
    for (Eigen::Index i = 0; i < pool.rows.rows(); ++i)
        for (Eigen::Index j = 0; j < pool.rows.cols(); ++j)
            if (pool.rows(i, j) < -1.0 || pool.rows(i, j) > 1.0)
                throw DataError("external pool row " + std::to_string(i + 1) + ", column " +
                                schema.names[static_cast<std::size_t>(j)] +
                                ": value outside [-1,1]; pools must be pre-normalized");
    return pool;
}

void write_pool_csv(const std::string& path, const SyntheticPool& pool,
                    const FeatureSchema& schema) {
    Dataset ds;
    ds.rows = pool.rows;
    ds.labels.assign(pool.size(), kPositive);
    ds.schema = schema;
    write_feature_csv(path, ds, true);
}

PoolQualityReport validate_pool(const SyntheticPool& pool, const Dataset& reference) {
    if (pool.size() == 0) throw DataError("cannot validate an empty pool");
    reference.check();
    if (pool.width() != reference.width())
        throw SchemaError("pool width does not match reference width");

    PoolQualityReport report;
    report.pool_size = pool.size();
    report.reference_size = reference.size();
    report.source = generator_name(pool.source);

    std::size_t out_of_range = 0;
    for (Eigen::Index j = 0; j < pool.rows.cols(); ++j) {
        const auto pcol = pool.rows.col(j);
        const auto rcol = reference.rows.col(j);
        const double pm = pcol.mean();
        const double rm = rcol.mean();
        const double ps = std::sqrt((pcol.array() - pm).square().mean());
        const double rs = std::sqrt((rcol.array() - rm).square().mean());
        report.mean_delta.push_back(pm - rm);
        report.stddev_delta.push_back(ps - rs);
        for (Eigen::Index i = 0; i < pool.rows.rows(); ++i)
            if (pool.rows(i, j) < -1.0 || pool.rows(i, j) > 1.0) ++out_of_range;
    }
    report.out_of_range_fraction =
        static_cast<double>(out_of_range) / static_cast<double>(pool.size() * pool.width());
    return report;
}

nlohmann::json pool_quality_to_json(const PoolQualityReport& report) {
    return {{"pool_size", report.pool_size},
            {"reference_size", report.reference_size},
            {"source", report.source},
            {"mean_delta", report.mean_delta},
            {"stddev_delta", report.stddev_delta},
            {"out_of_range_fraction", report.out_of_range_fraction}};
}

}  // namespace gamix
