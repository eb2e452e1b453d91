#pragma once

#include "gamix/dataset.hpp"

namespace gamix {

// Built-in desk-scale dataset: two multivariate Gaussian blobs in raw feature
// space, healthy at the origin and failed offset by `separation` along a
// decaying per-feature pattern, so the classes overlap but remain learnable.
// Features carry different raw scales to exercise normalization.
struct FixtureSpec {
    std::size_t positives = 100;
    std::size_t negatives = 10000;
    std::size_t width = 11;
    double separation = 1.5;

    void validate() const;
};

Dataset build_fixture(const FixtureSpec& spec, std::uint64_t seed);

}  // namespace gamix
