#include "gamix/fixture.hpp"

#include <cmath>

namespace gamix {

void FixtureSpec::validate() const {
    if (positives < 2 || negatives < 2)
        throw ConfigError("fixture needs at least 2 rows per class");
    if (width < 1) throw ConfigError("fixture width must be at least 1");
    if (separation < 0.0) throw ConfigError("fixture separation must be non-negative");
}

Dataset build_fixture(const FixtureSpec& spec, std::uint64_t seed) {
    spec.validate();
    const auto n = spec.positives + spec.negatives;
    const auto d = static_cast<Eigen::Index>(spec.width);

    Dataset ds;
    ds.schema = spec.width == 11 ? FeatureSchema::smart_default()
                                 : FeatureSchema::generic(spec.width);
    ds.rows.resize(static_cast<Eigen::Index>(n), d);
    ds.labels.reserve(n);

    // per-feature signal pattern: strong on the first features, fading out
    Eigen::VectorXd offset(d);
    for (Eigen::Index j = 0; j < d; ++j)
        offset(j) = spec.separation * std::pow(0.75, static_cast<double>(j));
    // raw scales differ by orders of magnitude, like real telemetry columns
    Eigen::VectorXd scale(d);
    for (Eigen::Index j = 0; j < d; ++j)
        scale(j) = std::pow(10.0, static_cast<double>(j % 3));

    Rng rng(derive_seed(seed, 0xF1C7u));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const bool positive = i < spec.positives;
        for (Eigen::Index j = 0; j < d; ++j) {
            const double base = gauss(rng) + (positive ? offset(j) : 0.0);
            ds.rows(static_cast<Eigen::Index>(i), j) = base * scale(j);
        }
        ds.labels.push_back(positive ? kPositive : kNegative);
    }
    return ds;
}

}  // namespace gamix
