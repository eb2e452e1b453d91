#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "gamix/dataset.hpp"

namespace test_helpers {

inline gamix::Dataset make_dataset(const std::vector<std::vector<double>>& rows,
                                   const std::vector<int>& labels) {
    gamix::Dataset ds;
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = n > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
    ds.rows.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            ds.rows(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    ds.labels = labels;
    ds.schema = gamix::FeatureSchema::generic(static_cast<std::size_t>(d));
    return ds;
}

// Scoped temp file; removed on destruction.
class TempFile {
public:
    explicit TempFile(const std::string& contents, const std::string& name = "") {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("gamix_test_" + std::to_string(++counter) + "_" + name + ".csv");
        std::ofstream out(path_);
        out << contents;
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    std::string path() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

}  // namespace test_helpers
