#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gamix/dataset.hpp"

namespace gamix {

enum class GeneratorKind { gaussian_copula, gaussian_mixture, interpolator, external };

std::string generator_name(GeneratorKind k);
GeneratorKind generator_from_name(const std::string& name);

struct GeneratorConfig {
    int mixture_components = 3;
    int interpolator_neighbors = 5;
};

// Fitted sampler over the minority class. Only the fields of the fitted
// kind are populated.
struct GeneratorModel {
    GeneratorKind kind = GeneratorKind::external;
    FeatureSchema schema;
    bool fitted = false;

    // gaussian_copula: empirical marginals + rank correlation of normal scores
    std::vector<std::vector<double>> sorted_values;  // per feature, ascending
    Matrix correlation;                              // d x d
    Matrix correlation_chol;                         // lower triangular
    std::vector<bool> constant_feature;

    // gaussian_mixture
    struct Component {
        double weight = 0.0;
        Eigen::VectorXd mean;
        Matrix covariance_chol;
    };
    std::vector<Component> components;

    // interpolator (SMOTE-style)
    Matrix stored_rows;
    std::vector<std::vector<int>> neighbor_lists;
    int neighbor_count = 0;
};

// Synthetic minority-class rows in normalized feature space. Every row is
// positive-labeled by construction and every value lies in [-1,1].
struct SyntheticPool {
    Matrix rows;
    GeneratorKind source = GeneratorKind::external;
    std::string provenance;

    std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
    std::size_t width() const { return static_cast<std::size_t>(rows.cols()); }
    void check() const;  // bounds + non-empty width
};

struct PoolQualityReport {
    std::size_t pool_size = 0;
    std::size_t reference_size = 0;
    std::string source;
    std::vector<double> mean_delta;    // pool mean - reference mean, per feature
    std::vector<double> stddev_delta;  // pool stddev - reference stddev
    double out_of_range_fraction = 0.0;
};

// Fits a sampler on minority rows only (all labels must be positive).
// Minimum row counts: copula 3, mixture components+1, interpolator
// neighbors+1. Deterministic given seed.
GeneratorModel fit_generator(GeneratorKind kind, const Dataset& minority,
                             const GeneratorConfig& config, std::uint64_t seed);

// Draws exactly n rows; deterministic given (model, n, seed).
SyntheticPool sample_pool(const GeneratorModel& model, std::size_t n, std::uint64_t seed);

// Reads a pre-normalized pool CSV (header = schema names, optional all-positive
// "label" column). Any value outside [-1,1] is rejected.
SyntheticPool load_external_pool(const std::string& path, const FeatureSchema& schema);

void write_pool_csv(const std::string& path, const SyntheticPool& pool,
                    const FeatureSchema& schema);

// Diagnostic comparison against the real minority data; never mutates.
PoolQualityReport validate_pool(const SyntheticPool& pool, const Dataset& reference);

nlohmann::json pool_quality_to_json(const PoolQualityReport& report);

}  // namespace gamix
