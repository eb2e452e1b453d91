#pragma once

#include <json.hpp>
#include <vector>

#include "gamix/dataset.hpp"

namespace gamix {

// Two-stage scaling fitted on training data only: z-score each feature,
// then map the z-scored training range onto [-1,1] with
//   x_normal = 2 * (z - z_min) / (z_max - z_min) - 1.
// Values outside the training range are clamped; constant features map to 0.
struct NormalizerParams {
    struct Feature {
        double mean = 0.0;
        double stddev = 1.0;  // population stddev of the training column
        double z_min = 0.0;   // min of the z-scored training column
        double z_max = 0.0;
        bool constant = false;
        bool operator==(const Feature&) const = default;
    };
    std::vector<Feature> features;
    FeatureSchema schema;

    std::size_t size() const { return features.size(); }
    bool operator==(const NormalizerParams&) const = default;
};

NormalizerParams fit_normalizer(const Dataset& train);
Dataset apply_normalizer(const NormalizerParams& params, const Dataset& ds);

// Inverse of the affine part: recovers the z-score from a normalized value.
// Only meaningful for in-range values of non-constant features.
double normalized_to_zscore(const NormalizerParams::Feature& f, double normalized);

nlohmann::json normalizer_to_json(const NormalizerParams& params);
NormalizerParams normalizer_from_json(const nlohmann::json& j);

}  // namespace gamix
