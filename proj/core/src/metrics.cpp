#include "gamix/metrics.hpp"

#include <cmath>

namespace gamix {

ConfusionMatrix confusion_matrix(const std::vector<int>& y_true,
                                 const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw DataError("confusion_matrix: " + std::to_string(y_true.size()) +
                        " labels vs " + std::to_string(y_pred.size()) + " predictions");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == 1)
            y_pred[i] == 1 ? ++cm.tp : ++cm.fn;
        else
            y_pred[i] == 1 ? ++cm.fp : ++cm.tn;
    }
    return cm;
}

double true_positive_rate(const ConfusionMatrix& cm) {
    const auto pos = cm.tp + cm.fn;
    if (pos == 0) throw DataError("TPR undefined: no positive samples");
    return static_cast<double>(cm.tp) / static_cast<double>(pos);
}

double true_negative_rate(const ConfusionMatrix& cm) {
    const auto neg = cm.tn + cm.fp;
    if (neg == 0) throw DataError("TNR undefined: no negative samples");
    return static_cast<double>(cm.tn) / static_cast<double>(neg);
}

double accuracy(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw DataError("accuracy undefined: empty matrix");
    return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

double g_mean(const ConfusionMatrix& cm) {
    return std::sqrt(true_positive_rate(cm) * true_negative_rate(cm));
}

nlohmann::json metrics_to_json(const ConfusionMatrix& cm) {
    return {{"tp", cm.tp},  {"fn", cm.fn},
            {"fp", cm.fp},  {"tn", cm.tn},
            {"tpr", true_positive_rate(cm)},
            {"tnr", true_negative_rate(cm)},
            {"g_mean", g_mean(cm)}};
}

}  // namespace gamix
