#include <benchmark/benchmark.h>

#include "gamix/classifiers/decision_tree.hpp"
#include "gamix/fixture.hpp"
#include "gamix/ga.hpp"
#include "gamix/generators.hpp"
#include "gamix/metrics.hpp"

namespace {

gamix::Dataset bench_dataset(std::size_t positives, std::size_t negatives) {
    gamix::FixtureSpec spec;
    spec.positives = positives;
    spec.negatives = negatives;
    spec.separation = 1.5;
    return gamix::build_fixture(spec, 7);
}

void BM_DecodeAllGenotypes(benchmark::State& state) {
    for (auto _ : state) {
        double sum = 0.0;
        for (int code = 0; code < 4096; ++code) {
            gamix::Genotype g;
            for (int b = 0; b < gamix::kChromosomeBits; ++b)
                g.bits[static_cast<std::size_t>(b)] =
                    static_cast<std::uint8_t>((code >> b) & 1);
            sum += gamix::decode_genotype(g)[0];
        }
        benchmark::DoNotOptimize(sum);
    }
}
BENCHMARK(BM_DecodeAllGenotypes);

void BM_AssembleBalancedSet(benchmark::State& state) {
    const auto need = static_cast<std::size_t>(state.range(0));
    gamix::Dataset train;
    train.schema = gamix::FeatureSchema::generic(11);
    train.rows = gamix::Matrix::Constant(static_cast<Eigen::Index>(need + 20), 11, -0.5);
    train.labels.assign(10, gamix::kPositive);
    train.labels.insert(train.labels.end(), need + 10, gamix::kNegative);

    std::array<gamix::SyntheticPool, 3> pools;
    for (auto& pool : pools)
        pool.rows = gamix::Matrix::Constant(static_cast<Eigen::Index>(need), 11, 0.5);

    const gamix::MixRatio ratio{{0.5, 0.3, 0.2}};
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(gamix::assemble_balanced_set(train, pools, ratio, ++seed));
}
BENCHMARK(BM_AssembleBalancedSet)->Arg(1000)->Arg(10000);

void BM_FitDecisionTree(benchmark::State& state) {
    const auto ds = bench_dataset(static_cast<std::size_t>(state.range(0)) / 2,
                                  static_cast<std::size_t>(state.range(0)) / 2);
    const auto spec = gamix::ClassifierSpec::make(gamix::ClassifierFamily::decision_tree);
    for (auto _ : state)
        benchmark::DoNotOptimize(gamix::fit_decision_tree(ds, spec, 1));
}
BENCHMARK(BM_FitDecisionTree)->Arg(2000)->Arg(10000);

void BM_CopulaSample(benchmark::State& state) {
    const auto base = bench_dataset(400, 400);
    const auto minority = base.select(base.indices_of(gamix::kPositive));
    gamix::Dataset scaled = minority;
    for (Eigen::Index i = 0; i < scaled.rows.rows(); ++i)
        for (Eigen::Index j = 0; j < scaled.rows.cols(); ++j)
            scaled.rows(i, j) = std::tanh(scaled.rows(i, j));
    const auto model =
        gamix::fit_generator(gamix::GeneratorKind::gaussian_copula, scaled, {}, 3);
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(gamix::sample_pool(model, 1000, ++seed));
}
BENCHMARK(BM_CopulaSample);

void BM_GMean(benchmark::State& state) {
    const gamix::ConfusionMatrix cm{812, 67, 1120, 98001};
    for (auto _ : state) benchmark::DoNotOptimize(gamix::g_mean(cm));
}
BENCHMARK(BM_GMean);

}  // namespace

BENCHMARK_MAIN();
