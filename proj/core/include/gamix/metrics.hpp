#pragma once

#include <cstdint>
#include <json.hpp>
#include <vector>

#include "gamix/common.hpp"

namespace gamix {

struct ConfusionMatrix {
    std::uint64_t tp = 0;  // true positive: failed drive predicted failed
    std::uint64_t fn = 0;  // false negative: failed drive predicted healthy
    std::uint64_t fp = 0;  // false positive: healthy drive predicted failed
    std::uint64_t tn = 0;  // true negative: healthy drive predicted healthy

    std::uint64_t total() const { return tp + fn + fp + tn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& y_true,
                                 const std::vector<int>& y_pred);

double true_positive_rate(const ConfusionMatrix& cm);
double true_negative_rate(const ConfusionMatrix& cm);
double accuracy(const ConfusionMatrix& cm);

// Geometric mean of TPR and TNR; requires both classes present.
double g_mean(const ConfusionMatrix& cm);

// {tp, fn, fp, tn, tpr, tnr, g_mean}
nlohmann::json metrics_to_json(const ConfusionMatrix& cm);

}  // namespace gamix
