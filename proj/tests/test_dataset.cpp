#include <doctest.h>

#include <set>
#include <sstream>

#include "gamix/dataset.hpp"
#include "helpers.hpp"

using namespace gamix;
using test_helpers::make_dataset;
using test_helpers::TempFile;

namespace {

const char* kSmartHeader =
    "date,serial_number,model,failure,smart_1_normalized,smart_3_normalized,"
    "smart_5_normalized,smart_5_raw,smart_7_normalized,smart_9_normalized,"
    "smart_187_normalized,smart_189_normalized,smart_194_normalized,"
    "smart_197_normalized,smart_197_raw";

std::string smart_row(int failure, double base, const std::string& missing_column = "") {
    const FeatureSchema schema = FeatureSchema::smart_default();
    std::ostringstream out;
    out << "2020-01-01,SER,ST4000DM000," << failure;
    for (std::size_t j = 0; j < schema.size(); ++j) {
        out << ",";
        if (schema.names[j] != missing_column) out << base + static_cast<double>(j);
    }
    out << "\n";
    return out.str();
}

}  // namespace

TEST_CASE("load_smart_csv projects rows onto the schema") {
    std::string csv = std::string(kSmartHeader) + "\n" + smart_row(0, 10.0) +
                      smart_row(0, 20.0) + smart_row(1, 30.0);
    TempFile file(csv, "basic");
    const auto result = load_smart_csv(file.path(), FeatureSchema::smart_default());

    CHECK(result.data.size() == 3);
    CHECK(result.data.labels == std::vector<int>{0, 0, 1});
    CHECK(result.dropped() == 0);
    // cells come through verbatim in schema order
    CHECK(result.data.rows(0, 0) == 10.0);
    CHECK(result.data.rows(0, 10) == 20.0);
    CHECK(result.data.rows(2, 3) == 33.0);
}

TEST_CASE("load_smart_csv reports the missing column by name") {
    std::string header(kSmartHeader);
    const auto pos = header.find(",smart_187_normalized");
    header.erase(pos, std::string(",smart_187_normalized").size());
    TempFile file(header + "\n2020-01-01,S,M,0,1,2,3,4,5,6,7,8,9,10\n", "nocol");

    CHECK_THROWS_WITH_AS(load_smart_csv(file.path(), FeatureSchema::smart_default()),
                         doctest::Contains("smart_187_normalized"), SchemaError);
}

TEST_CASE("load_smart_csv drops and counts rows with missing feature values") {
    std::string csv = std::string(kSmartHeader) + "\n";
    csv += smart_row(0, 1.0);
    csv += smart_row(1, 2.0, "smart_5_raw");
    csv += smart_row(0, 3.0);
    csv += smart_row(0, 4.0, "smart_5_raw");
    csv += smart_row(1, 5.0);
    TempFile file(csv, "missing");

    const auto result = load_smart_csv(file.path(), FeatureSchema::smart_default());
    CHECK(result.data.size() == 3);
    CHECK(result.dropped_missing == 2);
    CHECK(result.dropped() == 2);
}

TEST_CASE("load_smart_csv rejects unparseable numeric cells by row") {
    std::string csv = std::string(kSmartHeader) + "\n" + smart_row(0, 1.0);
    std::string bad = smart_row(1, 2.0);
    bad = bad.substr(0, bad.rfind(',') + 1) + "not_a_number\n";  // corrupt the last feature
    csv += bad;
    TempFile file(csv, "badnum");

    const auto result = load_smart_csv(file.path(), FeatureSchema::smart_default());
    CHECK(result.data.size() == 1);
    CHECK(result.dropped_unparseable == 1);
}

TEST_CASE("load_smart_csv errors on an empty result") {
    TempFile file(std::string(kSmartHeader) + "\n", "empty");
    CHECK_THROWS_AS(load_smart_csv(file.path(), FeatureSchema::smart_default()), DataError);
}

TEST_CASE("load_smart_csv model filter keeps only matching drives") {
    std::string csv = std::string(kSmartHeader) + "\n" + smart_row(0, 1.0) + smart_row(1, 2.0);
    csv += "2020-01-01,SER,OTHER,0,1,2,3,4,5,6,7,8,9,10,11\n";
    TempFile file(csv, "model");

    const auto result = load_smart_csv(file.path(), FeatureSchema::smart_default(),
                                       "ST4000DM000");
    CHECK(result.data.size() == 2);
    CHECK(result.skipped_model == 1);
}

TEST_CASE("feature csv round trip") {
    auto ds = make_dataset({{0.25, -1.0}, {0.5, 1.0}}, {0, 1});
    TempFile file("", "roundtrip");
    write_feature_csv(file.path(), ds, true);
    const auto back = read_feature_csv(file.path(), ds.schema, true);
    CHECK(back.rows == ds.rows);
    CHECK(back.labels == ds.labels);
}

TEST_CASE("stratified_split keeps exact class proportions") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 10; ++i) {
        rows.push_back({static_cast<double>(i)});
        labels.push_back(1);
    }
    for (int i = 0; i < 100; ++i) {
        rows.push_back({static_cast<double>(100 + i)});
        labels.push_back(0);
    }
    const auto ds = make_dataset(rows, labels);

    auto [train, test] = stratified_split(ds, 0.3, 42);
    CHECK(test.count_label(kPositive) == 3);
    CHECK(test.count_label(kNegative) == 30);
    CHECK(train.size() + test.size() == ds.size());

    // disjoint cover: every original value appears exactly once
    std::multiset<double> seen;
    for (Eigen::Index i = 0; i < train.rows.rows(); ++i) seen.insert(train.rows(i, 0));
    for (Eigen::Index i = 0; i < test.rows.rows(); ++i) seen.insert(test.rows(i, 0));
    CHECK(seen.size() == ds.size());
    for (Eigen::Index i = 0; i < ds.rows.rows(); ++i)
        CHECK(seen.count(ds.rows(i, 0)) == 1);
}

TEST_CASE("stratified_split is deterministic per seed") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 60; ++i) {
        rows.push_back({static_cast<double>(i)});
        labels.push_back(i % 6 == 0 ? 1 : 0);
    }
    const auto ds = make_dataset(rows, labels);

    auto [a_train, a_test] = stratified_split(ds, 0.25, 7);
    auto [b_train, b_test] = stratified_split(ds, 0.25, 7);
    CHECK(a_train.rows == b_train.rows);
    CHECK(a_test.rows == b_test.rows);
    CHECK(a_train.labels == b_train.labels);

    auto [c_train, c_test] = stratified_split(ds, 0.25, 8);
    CHECK(c_test.count_label(kPositive) == a_test.count_label(kPositive));
    CHECK(c_test.count_label(kNegative) == a_test.count_label(kNegative));
}

TEST_CASE("stratified_split reproduces the reference training composition") {
    // 246 positives + 24857 negatives (~1:100); a 30% test split leaves
    // 172 positives and 17400 negatives for training.
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 246; ++i) {
        rows.push_back({static_cast<double>(i)});
        labels.push_back(1);
    }
    for (int i = 0; i < 24857; ++i) {
        rows.push_back({static_cast<double>(1000 + i)});
        labels.push_back(0);
    }
    const auto ds = make_dataset(rows, labels);

    auto [train, test] = stratified_split(ds, 0.3, 2020);
    CHECK(train.count_label(kPositive) == 172);
    CHECK(train.count_label(kNegative) == 17400);
}

TEST_CASE("stratified_split needs two rows per class") {
    const auto ds = make_dataset({{1.0}, {2.0}, {3.0}}, {1, 0, 0});
    CHECK_THROWS_AS(stratified_split(ds, 0.5, 1), DataError);
}

TEST_CASE("subsample_to_ratio thins the majority class") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 50; ++i) {
        rows.push_back({static_cast<double>(i)});
        labels.push_back(1);
    }
    for (int i = 0; i < 10000; ++i) {
        rows.push_back({static_cast<double>(100 + i)});
        labels.push_back(0);
    }
    const auto ds = make_dataset(rows, labels);

    const auto out = subsample_to_ratio(ds, Ratio{1, 100}, 3);
    CHECK(out.count_label(kPositive) == 50);
    CHECK(out.count_label(kNegative) == 5000);

    const auto again = subsample_to_ratio(ds, Ratio{1, 100}, 3);
    CHECK(out.rows == again.rows);
}

TEST_CASE("subsample_to_ratio errors when the ratio is unrealizable") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 50; ++i) {
        rows.push_back({static_cast<double>(i)});
        labels.push_back(1);
    }
    for (int i = 0; i < 40; ++i) {
        rows.push_back({static_cast<double>(100 + i)});
        labels.push_back(0);
    }
    const auto ds = make_dataset(rows, labels);
    CHECK_THROWS_WITH_AS(subsample_to_ratio(ds, Ratio{1, 100}, 3), doctest::Contains("50"),
                         DataError);
}

TEST_CASE("subsample_to_ratio thins positives when they are in excess") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 110; ++i) {
        rows.push_back({static_cast<double>(i)});
        labels.push_back(i < 100 ? 1 : 0);
    }
    const auto ds = make_dataset(rows, labels);
    const auto out = subsample_to_ratio(ds, Ratio{1, 1}, 4);
    CHECK(out.count_label(kPositive) == 10);
    CHECK(out.count_label(kNegative) == 10);
}

TEST_CASE("subsample_to_ratio 1:1 keeps all positives") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 110; ++i) {
        rows.push_back({static_cast<double>(i)});
        labels.push_back(i < 10 ? 1 : 0);
    }
    const auto ds = make_dataset(rows, labels);
    const auto out = subsample_to_ratio(ds, Ratio{1, 1}, 9);
    CHECK(out.count_label(kPositive) == 10);
    CHECK(out.count_label(kNegative) == 10);
}
