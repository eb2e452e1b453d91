#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "gamix/common.hpp"

namespace gamix {

using Matrix = Eigen::MatrixXd;

constexpr int kNegative = 0;  // healthy drive
constexpr int kPositive = 1;  // failed drive

// Ordered list of feature column names. The default is the 11 SMART
// attributes used throughout: ids 1, 3, 5, 5(raw), 7, 9, 187, 189, 194,
// 197, 197(raw). Order is fixed and must be identical across train, test
// and synthetic pools.
struct FeatureSchema {
    std::vector<std::string> names;

    static FeatureSchema smart_default();
    // Anonymous schema f0..f{width-1} for small hand-built datasets.
    static FeatureSchema generic(std::size_t width);

    std::size_t size() const { return names.size(); }
    bool operator==(const FeatureSchema&) const = default;
};

// Numeric feature rows plus binary labels. Rows and labels are parallel.
struct Dataset {
    Matrix rows;              // n x d
    std::vector<int> labels;  // 0 = healthy, 1 = failed
    FeatureSchema schema;

    std::size_t size() const { return labels.size(); }
    std::size_t width() const { return static_cast<std::size_t>(rows.cols()); }
    std::size_t count_label(int label) const;
    std::vector<std::size_t> indices_of(int label) const;

    // New dataset holding the given rows, in the given order.
    Dataset select(const std::vector<std::size_t>& idx) const;

    // Throws DataError when rows/labels disagree or labels are not binary.
    void check() const;
};

struct Ratio {
    long long pos = 1;
    long long neg = 1;
};

struct LoadResult {
    Dataset data;
    std::size_t dropped_missing = 0;      // rows lacking a schema feature value
    std::size_t dropped_unparseable = 0;  // rows with a non-numeric cell
    std::size_t skipped_model = 0;        // rows excluded by the model filter
    std::size_t dropped() const { return dropped_missing + dropped_unparseable; }
};

// Reads a SMART telemetry CSV in the Backblaze column convention
// (date, serial_number, model, failure, smart_<id>_normalized, smart_<id>_raw)
// and projects it onto the schema. Rows with a missing or unparseable schema
// value are dropped and counted. Optionally keeps only one drive model.
LoadResult load_smart_csv(const std::string& path, const FeatureSchema& schema,
                          const std::string& model_filter = "");

// Reads/writes the flat feature CSV used for intermediate artifacts and
// external pools: header = schema names (+ "label" when present).
Dataset read_feature_csv(const std::string& path, const FeatureSchema& schema,
                         bool require_label);
void write_feature_csv(const std::string& path, const Dataset& ds, bool with_label);

// Splits per class so class proportions are preserved within one row.
// Deterministic given seed; the two parts are disjoint and cover ds.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double test_fraction,
                                             std::uint64_t seed);

// Keeps every row of the scarcer side and subsamples the other class until
// pos:neg matches the requested ratio. Deterministic given seed.
Dataset subsample_to_ratio(const Dataset& ds, Ratio pos_to_neg, std::uint64_t seed);

}  // namespace gamix
