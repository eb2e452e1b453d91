#include "gamix/normalizer.hpp"

#include <cmath>

namespace gamix {

NormalizerParams fit_normalizer(const Dataset& train) {
    train.check();
    if (train.size() == 0) throw DataError("cannot fit normalizer on an empty dataset");

    NormalizerParams params;
    params.schema = train.schema;
    const auto n = static_cast<double>(train.rows.rows());

    for (Eigen::Index j = 0; j < train.rows.cols(); ++j) {
        NormalizerParams::Feature f;
        const auto col = train.rows.col(j);
        f.mean = col.mean();
        f.stddev = std::sqrt((col.array() - f.mean).square().sum() / n);
        if (f.stddev == 0.0) {
            f.constant = true;
        } else {
            f.z_min = (col.minCoeff() - f.mean) / f.stddev;
            f.z_max = (col.maxCoeff() - f.mean) / f.stddev;
            if (f.z_min == f.z_max) f.constant = true;
        }
        params.features.push_back(f);
    }
    return params;
}

Dataset apply_normalizer(const NormalizerParams& params, const Dataset& ds) {
    ds.check();
    if (params.size() != ds.width())
        throw SchemaError("normalizer was fit on " + std::to_string(params.size()) +
                          " features, dataset has " + std::to_string(ds.width()));
    if (!params.schema.names.empty() && !(params.schema == ds.schema))
        throw SchemaError("dataset schema does not match normalizer schema");

    Dataset out = ds;
    for (Eigen::Index j = 0; j < out.rows.cols(); ++j) {
        const auto& f = params.features[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < out.rows.rows(); ++i) {
            if (f.constant) {
                out.rows(i, j) = 0.0;
                continue;
            }
            const double z = (out.rows(i, j) - f.mean) / f.stddev;
            const double scaled = 2.0 * (z - f.z_min) / (f.z_max - f.z_min) - 1.0;
            out.rows(i, j) = clamp_unit(scaled);
        }
    }
    return out;
}

double normalized_to_zscore(const NormalizerParams::Feature& f, double normalized) {
    return f.z_min + (normalized + 1.0) * 0.5 * (f.z_max - f.z_min);
}

nlohmann::json normalizer_to_json(const NormalizerParams& params) {
    nlohmann::json out;
    out["schema"] = params.schema.names;
    auto& arr = out["features"] = nlohmann::json::array();
    for (const auto& f : params.features) {
        arr.push_back({{"mean", f.mean},
                       {"stddev", f.stddev},
                       {"min", f.z_min},
                       {"max", f.z_max},
                       {"constant", f.constant}});
    }
    return out;
}

NormalizerParams normalizer_from_json(const nlohmann::json& j) {
    NormalizerParams params;
    params.schema.names = j.at("schema").get<std::vector<std::string>>();
    for (const auto& fj : j.at("features")) {
        NormalizerParams::Feature f;
        f.mean = fj.at("mean").get<double>();
        f.stddev = fj.at("stddev").get<double>();
        f.z_min = fj.at("min").get<double>();
        f.z_max = fj.at("max").get<double>();
        f.constant = fj.at("constant").get<bool>();
        params.features.push_back(f);
    }
    if (params.features.size() != params.schema.size())
        throw ConfigError("normalizer JSON: feature count does not match schema");
    return params;
}

}  // namespace gamix
