#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "gamix/ga.hpp"
#include "gamix/metrics.hpp"
#include "helpers.hpp"

using namespace gamix;
using test_helpers::make_dataset;

namespace {

// Predicts a fixed label regardless of input.
class ConstantModel final : public Model {
public:
    ConstantModel(int label, std::size_t width) : label_(label), width_(width) {}
    ClassifierFamily family() const override { return ClassifierFamily::decision_tree; }
    std::size_t input_width() const override { return width_; }
    std::vector<int> predict(const Matrix& rows) const override {
        return std::vector<int>(static_cast<std::size_t>(rows.rows()), label_);
    }
    nlohmann::json to_json() const override { return {{"family", "constant"}}; }

private:
    int label_;
    std::size_t width_;
};

// Reads the class straight off the first feature's sign.
class SignModel final : public Model {
public:
    explicit SignModel(std::size_t width) : width_(width) {}
    ClassifierFamily family() const override { return ClassifierFamily::decision_tree; }
    std::size_t input_width() const override { return width_; }
    std::vector<int> predict(const Matrix& rows) const override {
        std::vector<int> out;
        for (Eigen::Index i = 0; i < rows.rows(); ++i)
            out.push_back(rows(i, 0) > 0.0 ? kPositive : kNegative);
        return out;
    }
    nlohmann::json to_json() const override { return {{"family", "sign"}}; }

private:
    std::size_t width_;
};

// Real rows whose label equals the sign of feature 0; pools carry a sentinel
// second feature so synthetic rows are recognizable.
struct MockSetup {
    Dataset real_train;
    std::array<SyntheticPool, kPoolCount> pools;
};

MockSetup make_mock_setup(std::size_t n_pos = 8, std::size_t n_neg = 48) {
    Rng rng(40);
    std::uniform_real_distribution<double> mag(0.05, 0.5);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n_pos; ++i) {
        rows.push_back({mag(rng), mag(rng) - 0.25});
        labels.push_back(kPositive);
    }
    for (std::size_t i = 0; i < n_neg; ++i) {
        rows.push_back({-mag(rng), mag(rng) - 0.25});
        labels.push_back(kNegative);
    }
    MockSetup setup;
    setup.real_train = make_dataset(rows, labels);
    for (int p = 0; p < kPoolCount; ++p) {
        auto& pool = setup.pools[static_cast<std::size_t>(p)];
        pool.rows.resize(64, 2);
        for (Eigen::Index i = 0; i < pool.rows.rows(); ++i) {
            pool.rows(i, 0) = 0.1 + 0.01 * static_cast<double>(p);
            pool.rows(i, 1) = 0.777;  // sentinel: never appears in real rows
        }
        pool.source = GeneratorKind::external;
    }
    return setup;
}

}  // namespace

TEST_CASE("decode maps 4-bit groups to simplex points") {
    const auto ratio = decode_genotype(Genotype::from_string("011000000001"));
    CHECK(ratio[0] == doctest::Approx(6.0 / 7.0).epsilon(1e-12));
    CHECK(ratio[1] == 0.0);
    CHECK(ratio[2] == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
    // matches the published three-decimal form
    CHECK(std::round(ratio[0] * 1000.0) == 857);
    CHECK(std::round(ratio[2] * 1000.0) == 143);
}

TEST_CASE("degenerate and symmetric genotypes decode to the uniform ratio") {
    const MixRatio uniform{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    CHECK(decode_genotype(Genotype::from_string("000000000000")) == uniform);
    CHECK(decode_genotype(Genotype::from_string("000100010001")) == uniform);
}

TEST_CASE("decode covers all 4096 genotypes with valid simplex points") {
    for (int code = 0; code < 4096; ++code) {
        Genotype g;
        for (int b = 0; b < kChromosomeBits; ++b)
            g.bits[static_cast<std::size_t>(b)] =
                static_cast<std::uint8_t>((code >> (kChromosomeBits - 1 - b)) & 1);
        const auto ratio = decode_genotype(g);
        CHECK(std::abs(ratio.sum() - 1.0) <= 1e-12);
        for (double r : ratio.r) CHECK(r >= 0.0);
    }
}

TEST_CASE("genotype string and weight round trips") {
    const auto g = Genotype::from_weights(13, 8, 2);
    CHECK(g.to_string() == "110110000010");
    CHECK(Genotype::from_string(g.to_string()) == g);
    CHECK(g.weights() == std::array<int, 3>{13, 8, 2});
    CHECK_THROWS_AS(Genotype::from_string("101"), DataError);
    CHECK_THROWS_AS(Genotype::from_weights(16, 0, 0), DataError);
}

TEST_CASE("ratio keys identify decode-equivalent genotypes") {
    CHECK(ratio_key(Genotype::from_weights(1, 1, 1)) ==
          ratio_key(Genotype::from_weights(5, 5, 5)));
    CHECK(ratio_key(Genotype::from_weights(0, 0, 0)) ==
          ratio_key(Genotype::from_weights(3, 3, 3)));
    CHECK(ratio_key(Genotype::from_weights(6, 0, 2)) ==
          ratio_key(Genotype::from_weights(3, 0, 1)));
    CHECK(ratio_key(Genotype::from_weights(6, 0, 1)) !=
          ratio_key(Genotype::from_weights(6, 1, 0)));
}

TEST_CASE("assemble splits the deficit by largest remainder") {
    // 20 positives vs 120 negatives: deficit of 100
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 140; ++i) {
        rows.push_back({i < 20 ? 0.5 : -0.5});
        labels.push_back(i < 20 ? 1 : 0);
    }
    const auto train = make_dataset(rows, labels);

    std::array<SyntheticPool, kPoolCount> pools;
    for (auto& pool : pools) {
        pool.rows = Matrix::Constant(150, 1, 0.25);
        pool.source = GeneratorKind::external;
    }

    const auto out =
        assemble_balanced_set(train, pools, MixRatio{{0.5, 0.3, 0.2}}, 1);
    CHECK(out.counts == std::array<std::size_t, 3>{50, 30, 20});
    CHECK(out.data.count_label(kPositive) == 120);
    CHECK(out.data.count_label(kNegative) == 120);
    CHECK(!out.with_replacement[0]);

    SUBCASE("uniform thirds of 10 come out as {4,3,3}") {
        std::vector<std::vector<double>> r2;
        std::vector<int> l2;
        for (int i = 0; i < 30; ++i) {
            r2.push_back({i < 10 ? 0.5 : -0.5});
            l2.push_back(i < 10 ? 1 : 0);
        }
        const auto t2 = make_dataset(r2, l2);
        const auto o2 = assemble_balanced_set(
            t2, pools, MixRatio{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}, 2);
        CHECK(o2.counts == std::array<std::size_t, 3>{4, 3, 3});
    }
}

TEST_CASE("a single pool can carry the full reference-size deficit") {
    // 172 positives vs 17400 negatives, everything drawn from pool 1
    const std::size_t n_pos = 172, n_neg = 17400;
    Dataset train;
    train.schema = FeatureSchema::generic(1);
    train.rows.resize(static_cast<Eigen::Index>(n_pos + n_neg), 1);
    for (Eigen::Index i = 0; i < train.rows.rows(); ++i)
        train.rows(i, 0) = i < 172 ? 0.5 : -0.5;
    train.labels.assign(n_pos, kPositive);
    train.labels.insert(train.labels.end(), n_neg, kNegative);

    std::array<SyntheticPool, kPoolCount> pools;
    pools[0].rows = Matrix::Constant(17250, 1, 0.3);
    pools[1].rows = Matrix::Constant(5, 1, 0.3);
    pools[2].rows = Matrix::Constant(5, 1, 0.3);

    const auto out = assemble_balanced_set(train, pools, MixRatio{{1.0, 0.0, 0.0}}, 3);
    CHECK(out.counts == std::array<std::size_t, 3>{17228, 0, 0});
    CHECK(out.data.count_label(kPositive) == 17400);
    CHECK(out.data.count_label(kNegative) == 17400);
}

TEST_CASE("assemble enforces its preconditions") {
    std::array<SyntheticPool, kPoolCount> pools;
    for (auto& pool : pools) pool.rows = Matrix::Constant(10, 1, 0.0);

    const auto balanced = make_dataset({{0.1}, {-0.1}}, {1, 0});
    CHECK_THROWS_AS(assemble_balanced_set(balanced, pools, MixRatio{{1, 0, 0}}, 1), DataError);

    const auto train = make_dataset({{0.1}, {-0.1}, {-0.2}, {-0.3}}, {1, 0, 0, 0});
    pools[1].rows.resize(0, 1);
    CHECK_THROWS_AS(assemble_balanced_set(train, pools, MixRatio{{0, 1, 0}}, 1), DataError);
    CHECK_NOTHROW(assemble_balanced_set(train, pools, MixRatio{{1, 0, 0}}, 1));
}

TEST_CASE("assembled counts always sum to the deficit with exact balance") {
    std::array<SyntheticPool, kPoolCount> pools;
    for (auto& pool : pools) pool.rows = Matrix::Constant(300, 1, 0.5);
    Rng rng(88);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    for (std::size_t need = 1; need <= 40; ++need) {
        Dataset train;
        train.schema = FeatureSchema::generic(1);
        const auto n = static_cast<Eigen::Index>(2 + need + 2);
        train.rows = Matrix::Constant(n, 1, -0.5);
        train.rows.topRows(2).setConstant(0.5);
        train.labels.assign(2, kPositive);
        train.labels.insert(train.labels.end(), need + 2, kNegative);

        for (int trial = 0; trial < 10; ++trial) {
            const auto ratio = MixRatio::normalized(u(rng), u(rng), u(rng));
            const auto out = assemble_balanced_set(train, pools, ratio, trial);
            CHECK(out.counts[0] + out.counts[1] + out.counts[2] == need);
            CHECK(out.data.count_label(kPositive) == out.data.count_label(kNegative));
        }
    }
}

TEST_CASE("single-point crossover swaps tails at the cut") {
    auto a = Genotype::from_string("111111111111");
    auto b = Genotype::from_string("000000000000");
    single_point_crossover(a, b, 4);
    CHECK(a.to_string() == "111100000000");
    CHECK(b.to_string() == "000011111111");
    CHECK_THROWS_AS(single_point_crossover(a, b, 0), DataError);
    CHECK_THROWS_AS(single_point_crossover(a, b, 12), DataError);
}

TEST_CASE("disabled operators keep the population unchanged") {
    Rng rng(3);
    std::vector<Genotype> pop;
    for (int i = 0; i < 8; ++i) pop.push_back(Genotype::random(rng));
    std::vector<double> fits{0.1, 0.5, 0.3, 0.9, 0.2, 0.4, 0.8, 0.6};

    GaConfig cfg;
    cfg.population_size = 8;
    cfg.crossover_probability = 0.0;
    cfg.mutation_probability = 0.0;
    cfg.elite_count = 8;

    const auto next = next_generation(pop, fits, cfg, rng);
    auto sort_key = [](const Genotype& g) { return g.to_string(); };
    std::multiset<std::string> before, after;
    for (const auto& g : pop) before.insert(sort_key(g));
    for (const auto& g : next) after.insert(sort_key(g));
    CHECK(before == after);
}

TEST_CASE("certain mutation complements every bit") {
    Rng rng(5);
    const auto g = Genotype::from_string("110100101100");
    GaConfig cfg;
    cfg.population_size = 2;
    cfg.crossover_probability = 0.0;
    cfg.mutation_probability = 1.0;
    cfg.elite_count = 0;

    const std::vector<Genotype> pop{g, g};
    const auto next = next_generation(pop, {1.0, 1.0}, cfg, rng);
    for (const auto& child : next) CHECK(child.to_string() == "001011010011");
}

TEST_CASE("roulette selection is fitness proportional") {
    Rng rng(17);
    const std::vector<double> fits{1.0, 3.0};
    int better = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) better += roulette_select(fits, rng) == 1 ? 1 : 0;
    CHECK(static_cast<double>(better) / draws == doctest::Approx(0.75).epsilon(0.04));
}

TEST_CASE("zero total fitness falls back to uniform selection") {
    Rng rng(19);
    std::vector<Genotype> pop;
    for (int i = 0; i < 6; ++i) pop.push_back(Genotype::random(rng));
    GaConfig cfg;
    cfg.population_size = 6;
    GaStats stats;
    const auto next = next_generation(pop, std::vector<double>(6, 0.0), cfg, rng, &stats);
    CHECK(next.size() == 6);
    CHECK(stats.uniform_selection_fallbacks == 1);
}

TEST_CASE("run_ga with zero iterations evaluates the initial population once") {
    GaConfig cfg;
    cfg.population_size = 10;
    cfg.iterations = 0;
    cfg.seed = 5;
    int calls = 0;
    const auto result = run_ga(cfg, [&](const Genotype& g) {
        ++calls;
        return decode_genotype(g)[0];
    });
    CHECK(calls == 10);
    CHECK(result.history.empty());
    CHECK(result.stats.evaluations == 10);
    CHECK(result.best_fitness == doctest::Approx(result.best_ratio[0]));
}

TEST_CASE("run_ga is deterministic and monotone on a synthetic landscape") {
    const MixRatio target{{0.5, 0.3, 0.2}};
    auto landscape = [&](const Genotype& g) {
        const auto r = decode_genotype(g);
        double worst = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            worst = std::max(worst, std::abs(r[i] - target[i]));
        return 1.0 - worst;
    };

    GaConfig cfg;
    cfg.population_size = 30;
    cfg.iterations = 15;
    cfg.seed = 77;
    const auto a = run_ga(cfg, landscape);
    const auto b = run_ga(cfg, landscape);
    CHECK(a.best_genotype == b.best_genotype);
    CHECK(a.best_fitness == b.best_fitness);
    REQUIRE(a.history.size() == 15);
    for (std::size_t i = 0; i + 1 < a.history.size(); ++i) {
        CHECK(a.history[i].best <= a.history[i + 1].best);
        CHECK(a.history[i].best == b.history[i].best);
        CHECK(a.history[i].mean == b.history[i].mean);
    }
    // near-optimal after a full run
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        worst = std::max(worst, std::abs(a.best_ratio[i] - target[i]));
    CHECK(worst <= 0.07);
}

TEST_CASE("decode-equivalent genotypes share one cached training") {
    auto setup = make_mock_setup();
    FitnessContext ctx;
    ctx.real_train = setup.real_train;
    ctx.pools = setup.pools;
    ctx.seed = 9;
    ctx.fitness_splits = 1;
    ctx.trainer = [&](const Dataset& balanced, std::uint64_t) {
        return std::make_unique<SignModel>(balanced.width());
    };

    const double f1 = evaluate_fitness(Genotype::from_weights(1, 1, 1), ctx);
    const double f2 = evaluate_fitness(Genotype::from_weights(4, 4, 4), ctx);
    CHECK(f1 == f2);
    CHECK(ctx.trainings() == 1);
    CHECK(ctx.evaluations() == 1);
    CHECK(ctx.cache_hits() == 1);
}

TEST_CASE("prebuilt folds drive the evaluation and its averaging") {
    auto setup = make_mock_setup();
    FitnessContext ctx;
    ctx.seed = 15;
    // two folds with distinguishable pool sentinels
    for (int f = 0; f < 2; ++f) {
        FitnessFold fold;
        auto [tr, val] = stratified_split(setup.real_train, 0.25,
                                          static_cast<std::uint64_t>(f));
        fold.train = tr;
        fold.validation = val;
        fold.pools = setup.pools;
        for (auto& pool : fold.pools) pool.rows.col(1).setConstant(0.5 + 0.1 * f);
        ctx.folds.push_back(std::move(fold));
    }
    int trainings = 0;
    std::set<double> sentinels_seen;
    ctx.trainer = [&](const Dataset& balanced, std::uint64_t) {
        ++trainings;
        for (Eigen::Index i = 0; i < balanced.rows.rows(); ++i)
            if (balanced.rows(i, 1) >= 0.5) sentinels_seen.insert(balanced.rows(i, 1));
        return std::make_unique<SignModel>(balanced.width());
    };
    const double f = evaluate_fitness(Genotype::from_weights(1, 1, 1), ctx);
    CHECK(f == 1.0);
    CHECK(trainings == 2);
    CHECK(ctx.evaluations() == 1);
    // each fold contributed its own pool rows
    CHECK(sentinels_seen == std::set<double>{0.5, 0.6});
}

TEST_CASE("fitness averaging trains once per inner split") {
    auto setup = make_mock_setup();
    FitnessContext ctx;
    ctx.real_train = setup.real_train;
    ctx.pools = setup.pools;
    ctx.seed = 14;
    ctx.fitness_splits = 3;
    int trainings = 0;
    ctx.trainer = [&](const Dataset& balanced, std::uint64_t) {
        ++trainings;
        return std::make_unique<SignModel>(balanced.width());
    };
    const double f = evaluate_fitness(Genotype::from_weights(1, 1, 1), ctx);
    CHECK(trainings == 3);
    CHECK(ctx.evaluations() == 1);
    CHECK(f == 1.0);  // the sign oracle is perfect on every split
}

TEST_CASE("a majority-class mock scores zero fitness") {
    auto setup = make_mock_setup();
    FitnessContext ctx;
    ctx.real_train = setup.real_train;
    ctx.pools = setup.pools;
    ctx.seed = 10;
    ctx.trainer = [&](const Dataset& balanced, std::uint64_t) {
        return std::make_unique<ConstantModel>(kNegative, balanced.width());
    };
    CHECK(evaluate_fitness(Genotype::from_weights(1, 2, 3), ctx) == 0.0);
}

TEST_CASE("an oracle mock scores perfect fitness") {
    auto setup = make_mock_setup();
    FitnessContext ctx;
    ctx.real_train = setup.real_train;
    ctx.pools = setup.pools;
    ctx.seed = 11;
    ctx.trainer = [&](const Dataset& balanced, std::uint64_t) {
        return std::make_unique<SignModel>(balanced.width());
    };
    CHECK(evaluate_fitness(Genotype::from_weights(2, 1, 1), ctx) == 1.0);
}

TEST_CASE("fitness validation rows never come from the pools") {
    auto setup = make_mock_setup();
    FitnessContext ctx;
    ctx.real_train = setup.real_train;
    ctx.pools = setup.pools;
    ctx.seed = 12;
    ctx.trainer = [&](const Dataset& balanced, std::uint64_t) {
        return std::make_unique<SignModel>(balanced.width());
    };
    bool saw_synthetic_in_train = false;
    ctx.inspect = [&](const Dataset& train, const Dataset& validation) {
        for (Eigen::Index i = 0; i < validation.rows.rows(); ++i)
            CHECK(validation.rows(i, 1) != 0.777);  // pool sentinel
        for (Eigen::Index i = 0; i < train.rows.rows(); ++i)
            if (train.rows(i, 1) == 0.777) saw_synthetic_in_train = true;
    };
    evaluate_fitness(Genotype::from_weights(3, 2, 1), ctx);
    CHECK(saw_synthetic_in_train);
}

TEST_CASE("a failing trainer records a note and scores zero") {
    auto setup = make_mock_setup();
    FitnessContext ctx;
    ctx.real_train = setup.real_train;
    ctx.pools = setup.pools;
    ctx.seed = 13;
    ctx.fitness_splits = 1;
    ctx.trainer = [&](const Dataset&, std::uint64_t) -> std::unique_ptr<Model> {
        throw DataError("synthetic failure");
    };
    CHECK(evaluate_fitness(Genotype::from_weights(1, 0, 0), ctx) == 0.0);
    REQUIRE(ctx.notes().size() == 1);
    CHECK(ctx.notes()[0].find("synthetic failure") != std::string::npos);
}

TEST_CASE("parallel fitness evaluation matches sequential") {
    auto make_ctx = [](MockSetup& setup) {
        FitnessContext ctx;
        ctx.real_train = setup.real_train;
        ctx.pools = setup.pools;
        ctx.seed = 31;
        ctx.trainer = [](const Dataset& balanced, std::uint64_t) {
            return std::make_unique<SignModel>(balanced.width());
        };
        return ctx;
    };
    auto setup = make_mock_setup();
    GaConfig cfg;
    cfg.population_size = 20;
    cfg.iterations = 5;
    cfg.seed = 3;

    auto ctx_seq = make_ctx(setup);
    auto ctx_par = make_ctx(setup);
    GaRunHooks seq{.progress = nullptr, .threads = 1};
    GaRunHooks par{.progress = nullptr, .threads = 4};
    const auto a = run_ga(cfg, ctx_seq, seq);
    const auto b = run_ga(cfg, ctx_par, par);
    CHECK(a.best_genotype == b.best_genotype);
    CHECK(a.best_fitness == b.best_fitness);
    CHECK(a.stats.evaluations == b.stats.evaluations);
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].best == b.history[i].best);
        CHECK(a.history[i].mean == b.history[i].mean);
    }
}

TEST_CASE("ga progress streams one line per generation") {
    GaConfig cfg;
    cfg.population_size = 8;
    cfg.iterations = 4;
    cfg.seed = 2;
    std::ostringstream progress;
    GaRunHooks hooks;
    hooks.progress = &progress;
    run_ga(cfg, [](const Genotype& g) { return decode_genotype(g)[0]; }, hooks);
    const auto text = progress.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    CHECK(text.find("generation 1/4") != std::string::npos);
}

TEST_CASE("ga result serializes with history and cache stats") {
    GaConfig cfg;
    cfg.population_size = 6;
    cfg.iterations = 3;
    cfg.seed = 8;
    const auto result = run_ga(cfg, [](const Genotype& g) { return decode_genotype(g)[1]; });
    const auto j = ga_result_to_json(result);
    CHECK(j.at("best_genotype").get<std::string>().size() == 12);
    CHECK(j.at("history").size() == 3);
    CHECK(j.at("best_ratio").size() == 3);
    CHECK(j.contains("evaluations"));
    CHECK(j.contains("cache_hits"));
}

TEST_CASE("ga config validation") {
    GaConfig cfg;
    cfg.population_size = 3;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.population_size = 150;
    cfg.elite_count = 150;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.elite_count = 2;
    cfg.mutation_probability = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.mutation_probability = 0.01;
    CHECK_NOTHROW(cfg.validate());
}
