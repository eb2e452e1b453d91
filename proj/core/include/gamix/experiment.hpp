#pragma once

#include <optional>

#include "gamix/fixture.hpp"
#include "gamix/ga.hpp"
#include "gamix/metrics.hpp"
#include "gamix/normalizer.hpp"

namespace gamix {

constexpr int kVariantCount = 5;
extern const std::array<const char*, kVariantCount> kVariantNames;
// variant order: imbalanced, pool_1_only, pool_2_only, pool_3_only, ga_optimized

struct PoolSpec {
    GeneratorKind kind = GeneratorKind::gaussian_copula;
    GeneratorConfig config;
    std::string external_path;  // kind == external
};

struct InputSpec {
    enum class Kind { fixture, csv } kind = Kind::fixture;
    FixtureSpec fixture;
    std::string csv_path;
    std::string model_filter;
};

struct ExperimentConfig {
    InputSpec input;
    Ratio imbalance_ratio{1, 100};
    double test_fraction = 0.3;
    std::array<PoolSpec, kPoolCount> pools{
        PoolSpec{GeneratorKind::gaussian_copula},
        PoolSpec{GeneratorKind::gaussian_mixture},
        PoolSpec{GeneratorKind::interpolator}};
    std::size_t pool_size = 0;  // 0 = sized to the balance deficit
    std::vector<ClassifierSpec> classifiers = {
        ClassifierSpec::make(ClassifierFamily::mlp),
        ClassifierSpec::make(ClassifierFamily::svm),
        ClassifierSpec::make(ClassifierFamily::decision_tree),
        ClassifierSpec::make(ClassifierFamily::gaussian_nb),
        ClassifierSpec::make(ClassifierFamily::random_forest)};
    GaConfig ga;
    std::uint64_t seed = 1;
    int repetitions = 1;
    bool fitness_on_test = false;  // GA fitness scored on the test set (leaks)
    double validation_fraction = 0.25;
    int fitness_splits = 3;  // inner splits averaged per fitness evaluation
    int threads = 0;  // parallel GA evaluations; 0 = hardware

    void validate() const;
};

// Strict parser: unknown keys anywhere are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct VariantMetrics {
    ConfusionMatrix cm;
};

struct GaRunSummary {
    std::string genotype;
    MixRatio ratio;
    double fitness = 0.0;
    std::uint64_t evaluations = 0;
    std::uint64_t cache_hits = 0;
};

struct ClassifierRun {
    std::array<VariantMetrics, kVariantCount> variants;
    GaRunSummary ga;
};

struct ClassifierResult {
    ClassifierFamily family = ClassifierFamily::decision_tree;
    std::vector<ClassifierRun> runs;
    std::array<double, kVariantCount> mean_g_mean{};
    GaRunSummary best;  // the run with the highest GA fitness
};

struct PoolInfo {
    std::string kind;
    std::size_t size = 0;
    std::string provenance;
};

struct StageFailure {
    std::string stage;
    std::string error;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<std::uint64_t> run_seeds;
    std::vector<std::vector<PoolInfo>> pools;  // [repetition][pool]
    std::vector<ClassifierResult> results;
    std::vector<std::string> warnings;
    std::string guard_mode = "default";
    std::vector<std::uint64_t> guard_pre_eval_accesses;  // per repetition, 0 in default mode
    std::optional<StageFailure> partial;
    double total_seconds = 0.0;  // reported outside the deterministic body
};

struct RunOptions {
    std::ostream* ga_progress = nullptr;
};

// Full pipeline per repetition: build/subsample the base set, stratified
// 70/30 split, fit the normalizer on the training side only, fit generators
// on training positives, train the five-variant matrix per classifier, then
// score everything on the held-out test set. Stage errors abort into a
// partial report that keeps completed repetitions.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

enum class ReportFormat { json, markdown, csv };

std::string render_report(const ExperimentReport& report, ReportFormat format);

// Lossless form: {"body": ..., "timings": ...}; the body is byte-stable for
// a given config and master seed.
nlohmann::json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

}  // namespace gamix
