#include "gamix/ga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "gamix/metrics.hpp"

namespace gamix {

Genotype Genotype::random(Rng& rng) {
    Genotype g;
    std::uniform_int_distribution<int> bit(0, 1);
    for (auto& b : g.bits) b = static_cast<std::uint8_t>(bit(rng));
    return g;
}

Genotype Genotype::from_string(const std::string& s) {
    if (s.size() != kChromosomeBits)
        throw DataError("genotype string must have " + std::to_string(kChromosomeBits) +
                        " bits, got " + std::to_string(s.size()));
    Genotype g;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '0' && s[i] != '1') throw DataError("genotype string must be binary");
        g.bits[i] = static_cast<std::uint8_t>(s[i] - '0');
    }
    return g;
}

Genotype Genotype::from_weights(int w0, int w1, int w2) {
    const std::array<int, kPoolCount> w{w0, w1, w2};
    Genotype g;
    for (int i = 0; i < kPoolCount; ++i) {
        if (w[static_cast<std::size_t>(i)] < 0 || w[static_cast<std::size_t>(i)] > kMaxWeight)
            throw DataError("weight out of range [0," + std::to_string(kMaxWeight) + "]");
        for (int b = 0; b < kGroupBits; ++b)
            g.bits[static_cast<std::size_t>(i * kGroupBits + b)] = static_cast<std::uint8_t>(
                (w[static_cast<std::size_t>(i)] >> (kGroupBits - 1 - b)) & 1);
    }
    return g;
}

std::array<int, kPoolCount> Genotype::weights() const {
    std::array<int, kPoolCount> w{};
    for (int i = 0; i < kPoolCount; ++i)
        for (int b = 0; b < kGroupBits; ++b)
            w[static_cast<std::size_t>(i)] =
                (w[static_cast<std::size_t>(i)] << 1) |
                bits[static_cast<std::size_t>(i * kGroupBits + b)];
    return w;
}

std::string Genotype::to_string() const {
    std::string s;
    s.reserve(kChromosomeBits);
    for (auto b : bits) s += static_cast<char>('0' + b);
    return s;
}

MixRatio MixRatio::normalized(double a, double b, double c) {
    if (a < 0.0 || b < 0.0 || c < 0.0) throw DataError("mix ratio parts must be non-negative");
    const double total = a + b + c;
    if (total <= 0.0) throw DataError("mix ratio parts must not all be zero");
    return MixRatio{{a / total, b / total, c / total}};
}

MixRatio decode_genotype(const Genotype& g) {
    const auto w = g.weights();
    const int total = w[0] + w[1] + w[2];
    if (total == 0) return MixRatio{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    return MixRatio{{static_cast<double>(w[0]) / total, static_cast<double>(w[1]) / total,
                     static_cast<double>(w[2]) / total}};
}

RatioKey ratio_key(const Genotype& g) {
    auto w = g.weights();
    if (w[0] == 0 && w[1] == 0 && w[2] == 0) return RatioKey{{1, 1, 1}};
    const int g01 = std::gcd(w[0], w[1]);
    const int g012 = std::gcd(g01, w[2]);
    return RatioKey{{w[0] / g012, w[1] / g012, w[2] / g012}};
}

void GaConfig::validate() const {
    if (population_size < 2) throw ConfigError("population size must be at least 2");
    if (population_size % 2 != 0) throw ConfigError("population size must be even");
    if (iterations < 0) throw ConfigError("iterations must be non-negative");
    if (crossover_probability < 0.0 || crossover_probability > 1.0)
        throw ConfigError("crossover probability must be in [0,1]");
    if (mutation_probability < 0.0 || mutation_probability > 1.0)
        throw ConfigError("mutation probability must be in [0,1]");
    if (elite_count < 0 || elite_count >= population_size)
        throw ConfigError("elite count must be in [0, population size)");
}

AssembledSet assemble_balanced_set(const Dataset& real_train,
                                   const std::array<SyntheticPool, kPoolCount>& pools,
                                   const MixRatio& ratio, std::uint64_t seed) {
    real_train.check();
    const std::size_t n_pos = real_train.count_label(kPositive);
    const std::size_t n_neg = real_train.count_label(kNegative);
    if (n_pos >= n_neg)
        throw DataError("nothing to balance: " + std::to_string(n_pos) + " positives vs " +
                        std::to_string(n_neg) + " negatives");
    if (std::abs(ratio.sum() - 1.0) > 1e-9) throw DataError("mix ratio must sum to 1");
    const std::size_t need = n_neg - n_pos;

    // largest-remainder apportionment of `need` across the three pools
    std::array<std::size_t, kPoolCount> counts{};
    std::array<double, kPoolCount> remainder{};
    std::size_t assigned = 0;
    for (int i = 0; i < kPoolCount; ++i) {
        const double share = ratio[static_cast<std::size_t>(i)] * static_cast<double>(need);
        counts[static_cast<std::size_t>(i)] = static_cast<std::size_t>(std::floor(share));
        remainder[static_cast<std::size_t>(i)] =
            share - std::floor(share);
        assigned += counts[static_cast<std::size_t>(i)];
    }
    std::array<int, kPoolCount> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (remainder[static_cast<std::size_t>(a)] != remainder[static_cast<std::size_t>(b)])
            return remainder[static_cast<std::size_t>(a)] > remainder[static_cast<std::size_t>(b)];
        return a < b;
    });
    for (std::size_t leftover = need - assigned, k = 0; k < leftover; ++k)
        ++counts[static_cast<std::size_t>(order[k])];

    const auto d = real_train.rows.cols();
    AssembledSet out;
    out.counts = counts;
    out.data.schema = real_train.schema;
    out.data.rows.resize(static_cast<Eigen::Index>(real_train.size() + need), d);
    out.data.rows.topRows(real_train.rows.rows()) = real_train.rows;
    out.data.labels = real_train.labels;
    out.data.labels.reserve(real_train.size() + need);

    Eigen::Index write = real_train.rows.rows();
    for (int p = 0; p < kPoolCount; ++p) {
        const std::size_t count = counts[static_cast<std::size_t>(p)];
        if (count == 0) continue;
        const auto& pool = pools[static_cast<std::size_t>(p)];
        if (pool.size() == 0)
            throw DataError("pool " + std::to_string(p + 1) + " is empty but was assigned " +
                            std::to_string(count) + " rows");
        if (static_cast<std::size_t>(pool.rows.cols()) != static_cast<std::size_t>(d))
            throw SchemaError("pool " + std::to_string(p + 1) + " width does not match data");

        Rng rng(derive_seed(seed, 0xA55Eu, p));
        std::vector<std::size_t> picks;
        picks.reserve(count);
        if (pool.size() >= count) {
            std::vector<std::size_t> idx(pool.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            for (std::size_t k = 0; k < count; ++k) {
                std::uniform_int_distribution<std::size_t> pick(k, idx.size() - 1);
                std::swap(idx[k], idx[pick(rng)]);
                picks.push_back(idx[k]);
            }
            std::sort(picks.begin(), picks.end());
        } else {
            out.with_replacement[static_cast<std::size_t>(p)] = true;
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            for (std::size_t k = 0; k < count; ++k) picks.push_back(pick(rng));
        }
        for (auto row : picks) {
            out.data.rows.row(write++) = pool.rows.row(static_cast<Eigen::Index>(row));
            out.data.labels.push_back(kPositive);
        }
    }
    return out;
}

std::vector<std::string> FitnessContext::notes() const {
    std::lock_guard lock(state->mutex);
    return state->notes;
}

FitnessContext FitnessContext::for_classifier(Dataset real_train,
                                              std::array<SyntheticPool, kPoolCount> pools,
                                              const ClassifierSpec& spec, std::uint64_t seed) {
    FitnessContext ctx;
    ctx.real_train = std::move(real_train);
    ctx.pools = std::move(pools);
    ctx.seed = seed;
    ctx.trainer = [spec](const Dataset& balanced, std::uint64_t s) {
        return fit_model(spec, balanced, s);
    };
    return ctx;
}

namespace {

double score_candidate(const MixRatio& ratio, const FitnessContext& ctx,
                       const Dataset& train, const Dataset& validation,
                       const std::array<SyntheticPool, kPoolCount>& pools,
                       std::uint64_t seed) {
    try {
        const AssembledSet assembled = assemble_balanced_set(train, pools, ratio,
                                                             derive_seed(seed, 2));
        if (ctx.inspect) ctx.inspect(assembled.data, validation);
        ++ctx.state->trainings;
        const auto model = ctx.trainer(assembled.data, derive_seed(seed, 3));
        const auto predictions = model->predict(validation.rows);
        return g_mean(confusion_matrix(validation.labels, predictions));
    } catch (const std::exception& e) {
        ++ctx.state->trainings;
        std::lock_guard lock(ctx.state->mutex);
        ctx.state->notes.push_back(std::string("fitness evaluation failed: ") + e.what());
        return 0.0;
    }
}

double one_split_fitness(const MixRatio& ratio, const FitnessContext& ctx, int split_index,
                         std::uint64_t eval_seed) {
    try {
        // the split depends only on (ctx seed, split index): every candidate
        // ratio is scored against the same validation sets
        auto [inner_train, inner_val] = stratified_split(
            ctx.real_train, ctx.validation_fraction,
            derive_seed(ctx.seed, 0x5917u, split_index));
        return score_candidate(ratio, ctx, inner_train, inner_val, ctx.pools, eval_seed);
    } catch (const std::exception& e) {
        std::lock_guard lock(ctx.state->mutex);
        ctx.state->notes.push_back(std::string("fitness evaluation failed: ") + e.what());
        return 0.0;
    }
}

double compute_fitness(const MixRatio& ratio, const FitnessContext& ctx, std::uint64_t seed) {
    ++ctx.state->evaluations;
    if (ctx.external_validation)  // reproduction path: one fixed validation set
        return score_candidate(ratio, ctx, ctx.real_train, *ctx.external_validation,
                               ctx.pools, seed);
    if (!ctx.folds.empty()) {
        double total = 0.0;
        for (std::size_t f = 0; f < ctx.folds.size(); ++f) {
            const auto& fold = ctx.folds[f];
            total += score_candidate(ratio, ctx, fold.train, fold.validation, fold.pools,
                                     derive_seed(seed, 0xA7u, f));
        }
        return total / static_cast<double>(ctx.folds.size());
    }
    const int splits = std::max(1, ctx.fitness_splits);
    double total = 0.0;
    for (int s = 0; s < splits; ++s)
        total += one_split_fitness(ratio, ctx, s, derive_seed(seed, 0xA7u, s));
    return total / static_cast<double>(splits);
}

std::uint64_t key_seed(const FitnessContext& ctx, const RatioKey& key) {
    return derive_seed(ctx.seed, 0xF17Eu, key.w[0], key.w[1], key.w[2]);
}

}  // namespace

double evaluate_fitness(const Genotype& g, const FitnessContext& ctx) {
    const RatioKey key = ratio_key(g);
    {
        std::lock_guard lock(ctx.state->mutex);
        if (auto it = ctx.state->cache.find(key); it != ctx.state->cache.end()) {
            ++ctx.state->cache_hits;
            return it->second;
        }
    }
    const double fitness = compute_fitness(decode_genotype(g), ctx, key_seed(ctx, key));
    std::lock_guard lock(ctx.state->mutex);
    ctx.state->cache.emplace(key, fitness);
    return fitness;
}

std::size_t roulette_select(const std::vector<double>& fitnesses, Rng& rng) {
    double total = 0.0;
    for (double f : fitnesses) total += f;
    if (total <= 0.0) {
        std::uniform_int_distribution<std::size_t> pick(0, fitnesses.size() - 1);
        return pick(rng);
    }
    std::uniform_real_distribution<double> u(0.0, total);
    double target = u(rng);
    for (std::size_t i = 0; i < fitnesses.size(); ++i) {
        target -= fitnesses[i];
        if (target <= 0.0) return i;
    }
    return fitnesses.size() - 1;
}

void single_point_crossover(Genotype& a, Genotype& b, int point) {
    if (point < 1 || point >= kChromosomeBits)
        throw DataError("crossover point must be in [1," +
                        std::to_string(kChromosomeBits - 1) + "]");
    for (int i = point; i < kChromosomeBits; ++i)
        std::swap(a.bits[static_cast<std::size_t>(i)], b.bits[static_cast<std::size_t>(i)]);
}

std::vector<Genotype> next_generation(const std::vector<Genotype>& pop,
                                      const std::vector<double>& fitnesses,
                                      const GaConfig& cfg, Rng& rng, GaStats* stats) {
    const std::size_t m = pop.size();
    if (fitnesses.size() != m) throw DataError("population and fitness sizes differ");
    const auto elite_count = static_cast<std::size_t>(std::min<int>(cfg.elite_count,
                                                                    static_cast<int>(m)));

    std::vector<std::size_t> rank(m);
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::stable_sort(rank.begin(), rank.end(),
                     [&](std::size_t a, std::size_t b) { return fitnesses[a] > fitnesses[b]; });

    std::vector<Genotype> next;
    next.reserve(m);
    for (std::size_t i = 0; i < elite_count; ++i) next.push_back(pop[rank[i]]);

    double total = 0.0;
    for (double f : fitnesses) total += f;
    if (total <= 0.0 && stats) ++stats->uniform_selection_fallbacks;

    std::vector<Genotype> selected;
    selected.reserve(m - elite_count);
    for (std::size_t i = elite_count; i < m; ++i)
        selected.push_back(pop[roulette_select(fitnesses, rng)]);

    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> cut(1, kChromosomeBits - 1);
    for (std::size_t i = 0; i + 1 < selected.size(); i += 2)
        if (u(rng) < cfg.crossover_probability)
            single_point_crossover(selected[i], selected[i + 1], cut(rng));
    for (auto& g : selected)
        for (auto& bit : g.bits)
            if (u(rng) < cfg.mutation_probability) bit ^= 1;

    next.insert(next.end(), selected.begin(), selected.end());
    return next;
}

namespace {

using PopulationEvaluator =
    std::function<std::vector<double>(const std::vector<Genotype>&)>;

GaResult run_loop(const GaConfig& cfg, const PopulationEvaluator& evaluate,
                  const GaRunHooks& hooks, GaStats* stats) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, 0x6A5Eu));

    std::vector<Genotype> pop;
    pop.reserve(static_cast<std::size_t>(cfg.population_size));
    for (int i = 0; i < cfg.population_size; ++i) pop.push_back(Genotype::random(rng));

    GaResult result;
    std::vector<double> fits = evaluate(pop);
    result.best_genotype = pop[0];
    result.best_fitness = fits[0];
    auto absorb_best = [&](const std::vector<Genotype>& p, const std::vector<double>& f) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (f[i] > result.best_fitness) {
                result.best_fitness = f[i];
                result.best_genotype = p[i];
            }
        }
    };
    absorb_best(pop, fits);

    for (int gen = 1; gen <= cfg.iterations; ++gen) {
        pop = next_generation(pop, fits, cfg, rng, stats);
        fits = evaluate(pop);
        absorb_best(pop, fits);

        GenerationRecord record;
        record.best = *std::max_element(fits.begin(), fits.end());
        record.mean = std::accumulate(fits.begin(), fits.end(), 0.0) /
                      static_cast<double>(fits.size());
        result.history.push_back(record);

        if (hooks.progress)
            *hooks.progress << "generation " << gen << "/" << cfg.iterations
                            << " best " << record.best << " mean " << record.mean << "\n";
    }
    result.best_ratio = decode_genotype(result.best_genotype);
    return result;
}

}  // namespace

GaResult run_ga(const GaConfig& cfg, const std::function<double(const Genotype&)>& fitness,
                const GaRunHooks& hooks) {
    GaStats stats;
    auto evaluate = [&](const std::vector<Genotype>& pop) {
        std::vector<double> fits;
        fits.reserve(pop.size());
        for (const auto& g : pop) fits.push_back(fitness(g));
        stats.evaluations += pop.size();
        return fits;
    };
    GaResult result = run_loop(cfg, evaluate, hooks, &stats);
    result.stats = stats;
    return result;
}

GaResult run_ga(const GaConfig& cfg, const FitnessContext& ctx, const GaRunHooks& hooks) {
    GaStats stats;
    const std::uint64_t evaluations_before = ctx.state->evaluations.load();
    const int threads = hooks.threads <= 0
                            ? std::max(1u, std::thread::hardware_concurrency())
                            : hooks.threads;

    auto evaluate = [&](const std::vector<Genotype>& pop) {
        // evaluate each distinct uncached ratio once, possibly in parallel
        std::vector<RatioKey> keys(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i) keys[i] = ratio_key(pop[i]);

        std::vector<std::size_t> unique_pos;
        {
            std::unordered_map<RatioKey, bool, RatioKeyHash> seen;
            std::lock_guard lock(ctx.state->mutex);
            for (std::size_t i = 0; i < pop.size(); ++i) {
                if (ctx.state->cache.contains(keys[i]) || seen.count(keys[i])) continue;
                seen.emplace(keys[i], true);
                unique_pos.push_back(i);
            }
        }
        if (threads > 1 && unique_pos.size() > 1) {
            std::vector<std::thread> workers;
            std::atomic<std::size_t> cursor{0};
            const auto worker = [&] {
                for (std::size_t k = cursor.fetch_add(1); k < unique_pos.size();
                     k = cursor.fetch_add(1))
                    evaluate_fitness(pop[unique_pos[k]], ctx);
            };
            const int count = std::min<int>(threads, static_cast<int>(unique_pos.size()));
            workers.reserve(static_cast<std::size_t>(count));
            for (int t = 0; t < count; ++t) workers.emplace_back(worker);
            for (auto& w : workers) w.join();
        } else {
            for (auto i : unique_pos) evaluate_fitness(pop[i], ctx);
        }

        std::vector<double> fits(pop.size());
        std::lock_guard lock(ctx.state->mutex);
        for (std::size_t i = 0; i < pop.size(); ++i) fits[i] = ctx.state->cache.at(keys[i]);
        return fits;
    };

    GaResult result = run_loop(cfg, evaluate, hooks, &stats);
    const auto total_calls = static_cast<std::uint64_t>(cfg.population_size) *
                             static_cast<std::uint64_t>(cfg.iterations + 1);
    stats.evaluations = ctx.state->evaluations.load() - evaluations_before;
    stats.cache_hits = total_calls - stats.evaluations;
    result.stats = stats;
    return result;
}

nlohmann::json ga_result_to_json(const GaResult& result) {
    nlohmann::json history = nlohmann::json::array();
    for (const auto& rec : result.history)
        history.push_back({{"best", rec.best}, {"mean", rec.mean}});
    return {{"best_genotype", result.best_genotype.to_string()},
            {"best_ratio", result.best_ratio.r},
            {"best_fitness", result.best_fitness},
            {"history", std::move(history)},
            {"evaluations", result.stats.evaluations},
            {"cache_hits", result.stats.cache_hits},
            {"uniform_selection_fallbacks", result.stats.uniform_selection_fallbacks}};
}

}  // namespace gamix
