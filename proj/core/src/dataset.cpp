#include "gamix/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace gamix {

FeatureSchema FeatureSchema::smart_default() {
    return FeatureSchema{{
        "smart_1_normalized",
        "smart_3_normalized",
        "smart_5_normalized",
        "smart_5_raw",
        "smart_7_normalized",
        "smart_9_normalized",
        "smart_187_normalized",
        "smart_189_normalized",
        "smart_194_normalized",
        "smart_197_normalized",
        "smart_197_raw",
    }};
}

FeatureSchema FeatureSchema::generic(std::size_t width) {
    FeatureSchema s;
    s.names.reserve(width);
    for (std::size_t i = 0; i < width; ++i) s.names.push_back("f" + std::to_string(i));
    return s;
}

std::size_t Dataset::count_label(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

std::vector<std::size_t> Dataset::indices_of(int label) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) idx.push_back(i);
    return idx;
}

Dataset Dataset::select(const std::vector<std::size_t>& idx) const {
    Dataset out;
    out.schema = schema;
    out.rows.resize(static_cast<Eigen::Index>(idx.size()), rows.cols());
    out.labels.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.rows.row(static_cast<Eigen::Index>(i)) = rows.row(static_cast<Eigen::Index>(idx[i]));
        out.labels.push_back(labels[idx[i]]);
    }
    return out;
}

void Dataset::check() const {
    if (static_cast<std::size_t>(rows.rows()) != labels.size())
        throw DataError("dataset row count does not match label count");
    if (!schema.names.empty() && schema.size() != width())
        throw DataError("dataset width does not match schema");
    for (int l : labels)
        if (l != kNegative && l != kPositive)
            throw DataError("labels must be 0 or 1, got " + std::to_string(l));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(field);
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

LoadResult load_smart_csv(const std::string& path, const FeatureSchema& schema,
                          const std::string& model_filter) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    const auto header = split_csv_line(line);

    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col.emplace(header[i], i);

    auto require = [&](const std::string& name) {
        auto it = col.find(name);
        if (it == col.end()) throw SchemaError("missing required column: " + name);
        return it->second;
    };
    require("date");
    require("serial_number");
    const std::size_t model_col = require("model");
    const std::size_t failure_col = require("failure");
    std::vector<std::size_t> feature_cols;
    feature_cols.reserve(schema.size());
    for (const auto& name : schema.names) feature_cols.push_back(require(name));

    LoadResult result;
    std::vector<double> values;
    std::vector<int> labels;
    std::vector<double> row_buf(schema.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            ++result.dropped_unparseable;
            continue;
        }
        if (!model_filter.empty() && fields[model_col] != model_filter) {
            ++result.skipped_model;
            continue;
        }
        double failure;
        if (!parse_double(fields[failure_col], failure) || (failure != 0.0 && failure != 1.0)) {
            ++result.dropped_unparseable;
            continue;
        }
        bool missing = false;
        bool unparseable = false;
        for (std::size_t j = 0; j < feature_cols.size(); ++j) {
            const std::string& cell = fields[feature_cols[j]];
            if (cell.empty()) {
                missing = true;
                break;
            }
            if (!parse_double(cell, row_buf[j])) {
                unparseable = true;
                break;
            }
        }
        if (missing) {
            ++result.dropped_missing;
            continue;
        }
        if (unparseable) {
            ++result.dropped_unparseable;
            continue;
        }
        for (std::size_t j = 0; j < schema.size(); ++j) values.push_back(row_buf[j]);
        labels.push_back(static_cast<int>(failure));
    }

    if (labels.empty()) throw DataError("no usable rows in " + path);

    result.data.schema = schema;
    result.data.labels = std::move(labels);
    const auto n = static_cast<Eigen::Index>(result.data.labels.size());
    const auto d = static_cast<Eigen::Index>(schema.size());
    result.data.rows.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            result.data.rows(i, j) = values[static_cast<std::size_t>(i * d + j)];
    return result;
}

Dataset read_feature_csv(const std::string& path, const FeatureSchema& schema,
                         bool require_label) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    const auto header = split_csv_line(line);

    const std::size_t d = schema.size();
    bool has_label = false;
    if (header.size() == d + 1 && header.back() == "label") {
        has_label = true;
    } else if (header.size() != d) {
        throw SchemaError("expected " + std::to_string(d) + " feature columns (+ optional "
                          "label), got " + std::to_string(header.size()) + " columns in " +
                          path);
    }
    if (require_label && !has_label)
        throw SchemaError("missing required 'label' column in " + path);
    for (std::size_t j = 0; j < d; ++j)
        if (header[j] != schema.names[j])
            throw SchemaError("column " + std::to_string(j) + " is '" + header[j] +
                              "', expected '" + schema.names[j] + "'");

    std::vector<double> values;
    std::vector<int> labels;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row_no;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError("row " + std::to_string(row_no) + ": wrong field count");
        for (std::size_t j = 0; j < d; ++j) {
            double v;
            if (!parse_double(fields[j], v))
                throw DataError("row " + std::to_string(row_no) + ", column " +
                                schema.names[j] + ": not a number");
            values.push_back(v);
        }
        if (has_label) {
            double v;
            if (!parse_double(fields[d], v) || (v != 0.0 && v != 1.0))
                throw DataError("row " + std::to_string(row_no) + ": label must be 0 or 1");
            labels.push_back(static_cast<int>(v));
        } else {
            labels.push_back(kPositive);
        }
    }
    if (labels.empty()) throw DataError("no data rows in " + path);

    Dataset ds;
    ds.schema = schema;
    ds.labels = std::move(labels);
    const auto n = static_cast<Eigen::Index>(ds.labels.size());
    ds.rows.resize(n, static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j)
            ds.rows(i, j) = values[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(j)];
    return ds;
}

void write_feature_csv(const std::string& path, const Dataset& ds, bool with_label) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open file for writing: " + path);
    out.precision(17);
    for (std::size_t j = 0; j < ds.schema.size(); ++j) {
        if (j) out << ',';
        out << ds.schema.names[j];
    }
    if (with_label) out << ",label";
    out << '\n';
    for (Eigen::Index i = 0; i < ds.rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < ds.rows.cols(); ++j) {
            if (j) out << ',';
            out << ds.rows(i, j);
        }
        if (with_label) out << ',' << ds.labels[static_cast<std::size_t>(i)];
        out << '\n';
    }
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double test_fraction,
                                             std::uint64_t seed) {
    ds.check();
    if (test_fraction <= 0.0 || test_fraction >= 1.0)
        throw DataError("test_fraction must be in (0,1)");

    std::vector<std::size_t> train_idx, test_idx;
    for (int label : {kNegative, kPositive}) {
        auto idx = ds.indices_of(label);
        if (idx.size() < 2)
            throw DataError("cannot stratify: class " + std::to_string(label) + " has " +
                            std::to_string(idx.size()) + " rows");
        Rng rng(derive_seed(seed, 0x5f17u, label));
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto n_test = static_cast<std::size_t>(
            std::lround(test_fraction * static_cast<double>(idx.size())));
        test_idx.insert(test_idx.end(), idx.begin(), idx.begin() + n_test);
        train_idx.insert(train_idx.end(), idx.begin() + n_test, idx.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {ds.select(train_idx), ds.select(test_idx)};
}

Dataset subsample_to_ratio(const Dataset& ds, Ratio pos_to_neg, std::uint64_t seed) {
    ds.check();
    if (pos_to_neg.pos <= 0 || pos_to_neg.neg <= 0)
        throw DataError("ratio parts must be positive");

    auto pos = ds.indices_of(kPositive);
    auto neg = ds.indices_of(kNegative);
    const double a = static_cast<double>(pos_to_neg.pos);
    const double b = static_cast<double>(pos_to_neg.neg);

    auto take = [&](std::vector<std::size_t>& idx, std::size_t k, std::uint64_t tag) {
        Rng rng(derive_seed(seed, 0x54b5u, tag));
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(k);
    };

    const auto neg_target =
        static_cast<long long>(std::llround(static_cast<double>(pos.size()) * b / a));
    const auto pos_target =
        static_cast<long long>(std::llround(static_cast<double>(neg.size()) * a / b));

    if (neg_target >= 1 && neg_target <= static_cast<long long>(neg.size())) {
        take(neg, static_cast<std::size_t>(neg_target), 0);
    } else if (pos_target >= 1 && pos_target <= static_cast<long long>(pos.size())) {
        take(pos, static_cast<std::size_t>(pos_target), 1);
    } else {
        throw DataError("cannot realize ratio " + std::to_string(pos_to_neg.pos) + ":" +
                        std::to_string(pos_to_neg.neg) + " with " + std::to_string(pos.size()) +
                        " positives and " + std::to_string(neg.size()) + " negatives");
    }

    std::vector<std::size_t> keep;
    keep.reserve(pos.size() + neg.size());
    keep.insert(keep.end(), pos.begin(), pos.end());
    keep.insert(keep.end(), neg.begin(), neg.end());
    std::sort(keep.begin(), keep.end());
    return ds.select(keep);
}

}  // namespace gamix
