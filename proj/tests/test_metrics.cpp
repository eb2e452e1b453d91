#include <doctest.h>

#include <cmath>

#include "gamix/metrics.hpp"

using namespace gamix;

TEST_CASE("confusion_matrix counts the four cells") {
    CHECK(confusion_matrix({1, 1, 0, 0}, {1, 1, 0, 0}) == ConfusionMatrix{2, 0, 0, 2});
    CHECK(confusion_matrix({1, 0}, {0, 1}) == ConfusionMatrix{0, 1, 1, 0});
    CHECK(confusion_matrix({1, 1, 1, 0, 0, 0, 0, 0}, {1, 1, 0, 1, 0, 0, 0, 0}) ==
          ConfusionMatrix{2, 1, 1, 4});
}

TEST_CASE("confusion_matrix rejects length mismatches") {
    CHECK_THROWS_AS(confusion_matrix({1, 0}, {1}), DataError);
}

TEST_CASE("confusion_matrix counts sum to the vector length") {
    Rng rng(5);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> t, p;
        for (int i = 0; i < 37; ++i) {
            t.push_back(bit(rng));
            p.push_back(bit(rng));
        }
        CHECK(confusion_matrix(t, p).total() == t.size());
    }
}

TEST_CASE("g_mean on the reference examples") {
    CHECK(g_mean(ConfusionMatrix{5, 0, 0, 7}) == doctest::Approx(1.0));
    CHECK(g_mean(ConfusionMatrix{0, 3, 0, 7}) == doctest::Approx(0.0));
    CHECK(g_mean(ConfusionMatrix{8, 2, 10, 90}) ==
          doctest::Approx(std::sqrt(0.8 * 0.9)).epsilon(1e-9));
}

TEST_CASE("g_mean requires both classes") {
    CHECK_THROWS_AS(g_mean(ConfusionMatrix{0, 0, 1, 3}), DataError);
    CHECK_THROWS_AS(g_mean(ConfusionMatrix{1, 3, 0, 0}), DataError);
}

TEST_CASE("g_mean bounds and extreme cases") {
    Rng rng(17);
    std::uniform_int_distribution<std::uint64_t> count(0, 40);
    for (int trial = 0; trial < 300; ++trial) {
        ConfusionMatrix cm{count(rng), count(rng), count(rng), count(rng)};
        if (cm.tp + cm.fn == 0 || cm.tn + cm.fp == 0) continue;
        const double g = g_mean(cm);
        CHECK(g >= 0.0);
        CHECK(g <= 1.0);
        CHECK((g == 1.0) == (cm.fn == 0 && cm.fp == 0));
        CHECK((g == 0.0) == (cm.tp == 0 || cm.tn == 0));
    }
}

TEST_CASE("g_mean is scale invariant and class-swap symmetric") {
    Rng rng(23);
    std::uniform_int_distribution<std::uint64_t> count(0, 20);
    for (int trial = 0; trial < 200; ++trial) {
        ConfusionMatrix cm{count(rng) + 1, count(rng), count(rng), count(rng) + 1};
        const double g = g_mean(cm);
        for (std::uint64_t k : {2ull, 3ull, 10ull})
            CHECK(g_mean(ConfusionMatrix{cm.tp * k, cm.fn * k, cm.fp * k, cm.tn * k}) ==
                  doctest::Approx(g).epsilon(1e-12));
        CHECK(g_mean(ConfusionMatrix{cm.tn, cm.fp, cm.fn, cm.tp}) ==
              doctest::Approx(g).epsilon(1e-12));
    }
}

TEST_CASE("metric bundle serializes rates alongside counts") {
    const auto j = metrics_to_json(ConfusionMatrix{8, 2, 10, 90});
    CHECK(j.at("tp") == 8);
    CHECK(j.at("fn") == 2);
    CHECK(j.at("fp") == 10);
    CHECK(j.at("tn") == 90);
    CHECK(j.at("tpr").get<double>() == doctest::Approx(0.8));
    CHECK(j.at("tnr").get<double>() == doctest::Approx(0.9));
    CHECK(j.at("g_mean").get<double>() == doctest::Approx(std::sqrt(0.72)));
}
