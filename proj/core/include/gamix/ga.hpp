#pragma once

#include <array>
#include <atomic>
#include <functional>
#include <json.hpp>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <unordered_map>

#include "gamix/classifiers/classifier.hpp"
#include "gamix/dataset.hpp"
#include "gamix/generators.hpp"

namespace gamix {

constexpr int kChromosomeBits = 12;
constexpr int kPoolCount = 3;
constexpr int kGroupBits = kChromosomeBits / kPoolCount;
constexpr int kMaxWeight = (1 << kGroupBits) - 1;  // 15

// Fixed-length binary chromosome: three 4-bit big-endian integer weights.
struct Genotype {
    std::array<std::uint8_t, kChromosomeBits> bits{};

    static Genotype random(Rng& rng);
    static Genotype from_string(const std::string& s);  // e.g. "011000000001"
    static Genotype from_weights(int w0, int w1, int w2);

    std::array<int, kPoolCount> weights() const;
    std::string to_string() const;
    bool operator==(const Genotype&) const = default;
};

// Point on the 3-pool probability simplex.
struct MixRatio {
    std::array<double, kPoolCount> r{};

    double operator[](std::size_t i) const { return r[i]; }
    double sum() const { return r[0] + r[1] + r[2]; }
    // Normalizes arbitrary non-negative shares onto the simplex.
    static MixRatio normalized(double a, double b, double c);
    bool operator==(const MixRatio&) const = default;
};

// Weight triple reduced by its gcd; two genotypes share a key exactly when
// they decode to the same ratio. The all-zero triple reduces to uniform.
struct RatioKey {
    std::array<int, kPoolCount> w{};
    bool operator==(const RatioKey&) const = default;
};

struct RatioKeyHash {
    std::size_t operator()(const RatioKey& k) const {
        return static_cast<std::size_t>(mix64((static_cast<std::uint64_t>(k.w[0]) << 32) ^
                                              (static_cast<std::uint64_t>(k.w[1]) << 16) ^
                                              static_cast<std::uint64_t>(k.w[2])));
    }
};

// Each 4-bit group is read big-endian as a weight in [0,15] and the triple
// is normalized to sum 1. The all-zero genotype decodes to the uniform ratio.
MixRatio decode_genotype(const Genotype& g);
RatioKey ratio_key(const Genotype& g);

struct GaConfig {
    int population_size = 150;
    int iterations = 50;
    double crossover_probability = 0.8;
    double mutation_probability = 0.01;  // per bit
    int elite_count = 2;
    std::uint64_t seed = 0;

    void validate() const;
};

struct AssembledSet {
    Dataset data;  // all real rows + drawn synthetic positives, exactly 1:1
    std::array<std::size_t, kPoolCount> counts{};
    std::array<bool, kPoolCount> with_replacement{};  // pool smaller than its count
};

// Tops up the minority class to exact 1:1 balance with synthetic rows drawn
// from the pools per the ratio. Counts come from largest-remainder rounding
// so they always sum to the deficit exactly.
AssembledSet assemble_balanced_set(const Dataset& real_train,
                                   const std::array<SyntheticPool, kPoolCount>& pools,
                                   const MixRatio& ratio, std::uint64_t seed);

using TrainFn =
    std::function<std::unique_ptr<Model>(const Dataset& balanced, std::uint64_t seed)>;

// One pre-built inner train/validation pair with pools fit on that fold's
// training positives only, so no generator has seen a validation row.
struct FitnessFold {
    Dataset train;
    Dataset validation;  // real rows only
    std::array<SyntheticPool, kPoolCount> pools;
};

// Everything a fitness evaluation needs. Evaluations are pure given the
// decoded ratio and ctx seed; results are cached per reduced ratio, so the
// cache may be shared across threads (all writers compute identical values).
struct FitnessContext {
    Dataset real_train;  // normalized, imbalanced
    std::array<SyntheticPool, kPoolCount> pools;
    TrainFn trainer;
    double validation_fraction = 0.25;  // inner stratified split, real rows only
    // Fitness = mean G-mean over this many deterministic inner splits. One
    // split of a small minority class is too noisy for an argmax over
    // thousands of candidates; averaging tames the selection bias.
    int fitness_splits = 3;
    // When non-empty, evaluations use these folds (and their leak-free pools)
    // instead of splitting real_train; fitness_splits is ignored.
    std::vector<FitnessFold> folds;
    // When set, skips the inner split: trains on all real rows + synthetics and
    // scores on these rows instead (reproduction mode; leaks if given test data).
    std::optional<Dataset> external_validation;
    std::uint64_t seed = 0;

    // test hook: observes the assembled train / validation pair of each evaluation
    std::function<void(const Dataset& train, const Dataset& validation)> inspect;

    struct SharedState {
        std::mutex mutex;
        std::unordered_map<RatioKey, double, RatioKeyHash> cache;
        std::atomic<std::uint64_t> evaluations{0};  // cache misses (ratios computed)
        std::atomic<std::uint64_t> trainings{0};    // classifier fits, splits included
        std::atomic<std::uint64_t> cache_hits{0};
        std::vector<std::string> notes;  // guarded by mutex
    };
    std::unique_ptr<SharedState> state = std::make_unique<SharedState>();

    std::uint64_t evaluations() const { return state->evaluations.load(); }
    std::uint64_t trainings() const { return state->trainings.load(); }
    std::uint64_t cache_hits() const { return state->cache_hits.load(); }
    std::vector<std::string> notes() const;

    static FitnessContext for_classifier(Dataset real_train,
                                         std::array<SyntheticPool, kPoolCount> pools,
                                         const ClassifierSpec& spec, std::uint64_t seed);
};

// G-mean of the ctx classifier trained on the balanced candidate set,
// measured on real rows only. A failed training scores 0 and the error is
// recorded as a note.
double evaluate_fitness(const Genotype& g, const FitnessContext& ctx);

struct GaStats {
    std::uint64_t evaluations = 0;  // fitness computations that were not cache hits
    std::uint64_t cache_hits = 0;
    int uniform_selection_fallbacks = 0;  // generations where all fitnesses were 0
};

struct GenerationRecord {
    double best = 0.0;
    double mean = 0.0;
};

struct GaResult {
    Genotype best_genotype;
    MixRatio best_ratio;
    double best_fitness = 0.0;
    std::vector<GenerationRecord> history;  // one record per evolved generation
    GaStats stats;
};

// Roulette-wheel draw: index i selected with probability fitness_i / sum.
// Falls back to uniform when the total fitness is zero.
std::size_t roulette_select(const std::vector<double>& fitnesses, Rng& rng);

// Swaps the tails of both parents from bit `point` on; point in [1, 11].
void single_point_crossover(Genotype& a, Genotype& b, int point);

// One evolutionary step: elite copies, roulette selection, single-point
// crossover per pair with probability p_c, then per-bit mutation.
std::vector<Genotype> next_generation(const std::vector<Genotype>& pop,
                                      const std::vector<double>& fitnesses,
                                      const GaConfig& cfg, Rng& rng,
                                      GaStats* stats = nullptr);

struct GaRunHooks {
    std::ostream* progress = nullptr;  // one line per generation when set
    int threads = 1;                   // parallel fitness evaluations (ctx overload)
};

// Generic driver: fitness as an arbitrary function of the genotype,
// evaluated sequentially without caching.
GaResult run_ga(const GaConfig& cfg, const std::function<double(const Genotype&)>& fitness,
                const GaRunHooks& hooks = {});

// Classifier-in-the-loop driver: evaluations dedupe through the ctx cache and
// may run in parallel; results are identical to sequential execution.
GaResult run_ga(const GaConfig& cfg, const FitnessContext& ctx, const GaRunHooks& hooks = {});

nlohmann::json ga_result_to_json(const GaResult& result);

}  // namespace gamix
