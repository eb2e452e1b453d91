#include "gamix/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace gamix {

const std::array<const char*, kVariantCount> kVariantNames = {
    "imbalanced", "pool_1_only", "pool_2_only", "pool_3_only", "ga_optimized"};

void ExperimentConfig::validate() const {
    if (input.kind == InputSpec::Kind::fixture) input.fixture.validate();
    if (input.kind == InputSpec::Kind::csv && input.csv_path.empty())
        throw ConfigError("csv input requires a path");
    if (imbalance_ratio.pos <= 0 || imbalance_ratio.neg <= 0)
        throw ConfigError("imbalance ratio parts must be positive");
    if (test_fraction <= 0.0 || test_fraction >= 1.0)
        throw ConfigError("test fraction must be in (0,1)");
    for (const auto& p : pools)
        if (p.kind == GeneratorKind::external && p.external_path.empty())
            throw ConfigError("external pool requires a path");
    if (classifiers.empty()) throw ConfigError("at least one classifier is required");
    if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
    if (validation_fraction <= 0.0 || validation_fraction >= 1.0)
        throw ConfigError("validation fraction must be in (0,1)");
    if (fitness_splits < 1) throw ConfigError("fitness_splits must be at least 1");
    ga.validate();
}

namespace {

void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
    check_keys(j, {"input", "imbalance_ratio", "test_fraction", "pools", "pool_size",
                   "classifiers", "classifier_params", "ga", "seed", "repetitions",
                   "fitness_on_test", "validation_fraction", "fitness_splits",
                   "threads"},
               "config");
    ExperimentConfig cfg;

    if (j.contains("input")) {
        const auto& in = j.at("input");
        check_keys(in, {"type", "positives", "negatives", "width", "separation", "path",
                        "model_filter"},
                   "input");
        const auto type = in.at("type").get<std::string>();
        if (type == "fixture") {
            cfg.input.kind = InputSpec::Kind::fixture;
            read_if(in, "positives", cfg.input.fixture.positives);
            read_if(in, "negatives", cfg.input.fixture.negatives);
            read_if(in, "width", cfg.input.fixture.width);
            read_if(in, "separation", cfg.input.fixture.separation);
        } else if (type == "csv") {
            cfg.input.kind = InputSpec::Kind::csv;
            cfg.input.csv_path = in.at("path").get<std::string>();
            read_if(in, "model_filter", cfg.input.model_filter);
        } else {
            throw ConfigError("input type must be 'fixture' or 'csv'");
        }
    }

    if (j.contains("imbalance_ratio")) {
        const auto& r = j.at("imbalance_ratio");
        if (!r.is_array() || r.size() != 2)
            throw ConfigError("imbalance_ratio must be a [pos, neg] pair");
        cfg.imbalance_ratio.pos = r.at(0).get<long long>();
        cfg.imbalance_ratio.neg = r.at(1).get<long long>();
    }
    read_if(j, "test_fraction", cfg.test_fraction);

    if (j.contains("pools")) {
        const auto& pools = j.at("pools");
        if (!pools.is_array() || pools.size() != kPoolCount)
            throw ConfigError("pools must list exactly " + std::to_string(kPoolCount) +
                              " entries");
        for (int i = 0; i < kPoolCount; ++i) {
            const auto& p = pools.at(static_cast<std::size_t>(i));
            check_keys(p, {"kind", "components", "neighbors", "path"},
                       "pools[" + std::to_string(i) + "]");
            PoolSpec spec;
            spec.kind = generator_from_name(p.at("kind").get<std::string>());
            read_if(p, "components", spec.config.mixture_components);
            read_if(p, "neighbors", spec.config.interpolator_neighbors);
            read_if(p, "path", spec.external_path);
            cfg.pools[static_cast<std::size_t>(i)] = spec;
        }
    }
    read_if(j, "pool_size", cfg.pool_size);

    if (j.contains("classifiers")) {
        cfg.classifiers.clear();
        for (const auto& name : j.at("classifiers"))
            cfg.classifiers.push_back(
                ClassifierSpec::make(family_from_name(name.get<std::string>())));
    }
    if (j.contains("classifier_params")) {
        const auto& params = j.at("classifier_params");
        check_keys(params, {"mlp", "svm", "decision_tree", "gaussian_nb", "random_forest"},
                   "classifier_params");
        for (auto& spec : cfg.classifiers) {
            const auto name = family_name(spec.family);
            if (!params.contains(name)) continue;
            const auto& p = params.at(name);
            switch (spec.family) {
                case ClassifierFamily::mlp:
                    check_keys(p, {"hidden1", "hidden2", "learning_rate", "epochs",
                                   "batch_size"},
                               name);
                    read_if(p, "hidden1", spec.mlp.hidden1);
                    read_if(p, "hidden2", spec.mlp.hidden2);
                    read_if(p, "learning_rate", spec.mlp.learning_rate);
                    read_if(p, "epochs", spec.mlp.epochs);
                    read_if(p, "batch_size", spec.mlp.batch_size);
                    break;
                case ClassifierFamily::svm:
                    check_keys(p, {"c", "gamma", "kkt_tolerance", "max_pair_updates"}, name);
                    read_if(p, "c", spec.svm.c);
                    read_if(p, "gamma", spec.svm.gamma);
                    read_if(p, "kkt_tolerance", spec.svm.kkt_tolerance);
                    read_if(p, "max_pair_updates", spec.svm.max_pair_updates);
                    break;
                case ClassifierFamily::decision_tree:
                    check_keys(p, {"max_depth"}, name);
                    read_if(p, "max_depth", spec.tree.max_depth);
                    break;
                case ClassifierFamily::gaussian_nb:
                    check_keys(p, {"variance_floor"}, name);
                    read_if(p, "variance_floor", spec.nb.variance_floor);
                    break;
                case ClassifierFamily::random_forest:
                    check_keys(p, {"n_estimators", "max_depth", "features_per_split",
                                   "bootstrap"},
                               name);
                    read_if(p, "n_estimators", spec.forest.n_estimators);
                    read_if(p, "max_depth", spec.forest.max_depth);
                    read_if(p, "features_per_split", spec.forest.features_per_split);
                    read_if(p, "bootstrap", spec.forest.bootstrap);
                    break;
            }
        }
    }

    if (j.contains("ga")) {
        const auto& g = j.at("ga");
        check_keys(g, {"population_size", "iterations", "crossover_probability",
                       "mutation_probability", "elite_count"},
                   "ga");
        read_if(g, "population_size", cfg.ga.population_size);
        read_if(g, "iterations", cfg.ga.iterations);
        read_if(g, "crossover_probability", cfg.ga.crossover_probability);
        read_if(g, "mutation_probability", cfg.ga.mutation_probability);
        read_if(g, "elite_count", cfg.ga.elite_count);
    }
    read_if(j, "seed", cfg.seed);
    read_if(j, "repetitions", cfg.repetitions);
    read_if(j, "fitness_on_test", cfg.fitness_on_test);
    read_if(j, "validation_fraction", cfg.validation_fraction);
    read_if(j, "fitness_splits", cfg.fitness_splits);
    read_if(j, "threads", cfg.threads);

    cfg.validate();
    return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json input;
    if (cfg.input.kind == InputSpec::Kind::fixture) {
        input = {{"type", "fixture"},
                 {"positives", cfg.input.fixture.positives},
                 {"negatives", cfg.input.fixture.negatives},
                 {"width", cfg.input.fixture.width},
                 {"separation", cfg.input.fixture.separation}};
    } else {
        input = {{"type", "csv"}, {"path", cfg.input.csv_path}};
        if (!cfg.input.model_filter.empty()) input["model_filter"] = cfg.input.model_filter;
    }

    nlohmann::json pools = nlohmann::json::array();
    for (const auto& p : cfg.pools) {
        nlohmann::json pj{{"kind", generator_name(p.kind)}};
        if (p.kind == GeneratorKind::gaussian_mixture)
            pj["components"] = p.config.mixture_components;
        if (p.kind == GeneratorKind::interpolator)
            pj["neighbors"] = p.config.interpolator_neighbors;
        if (p.kind == GeneratorKind::external) pj["path"] = p.external_path;
        pools.push_back(std::move(pj));
    }

    nlohmann::json classifiers = nlohmann::json::array();
    nlohmann::json classifier_params;
    for (const auto& spec : cfg.classifiers) {
        const auto name = family_name(spec.family);
        classifiers.push_back(name);
        switch (spec.family) {
            case ClassifierFamily::mlp:
                classifier_params[name] = {{"hidden1", spec.mlp.hidden1},
                                           {"hidden2", spec.mlp.hidden2},
                                           {"learning_rate", spec.mlp.learning_rate},
                                           {"epochs", spec.mlp.epochs},
                                           {"batch_size", spec.mlp.batch_size}};
                break;
            case ClassifierFamily::svm:
                classifier_params[name] = {{"c", spec.svm.c},
                                           {"gamma", spec.svm.gamma},
                                           {"kkt_tolerance", spec.svm.kkt_tolerance},
                                           {"max_pair_updates", spec.svm.max_pair_updates}};
                break;
            case ClassifierFamily::decision_tree:
                classifier_params[name] = {{"max_depth", spec.tree.max_depth}};
                break;
            case ClassifierFamily::gaussian_nb:
                classifier_params[name] = {{"variance_floor", spec.nb.variance_floor}};
                break;
            case ClassifierFamily::random_forest:
                classifier_params[name] = {{"n_estimators", spec.forest.n_estimators},
                                           {"max_depth", spec.forest.max_depth},
                                           {"features_per_split", spec.forest.features_per_split},
                                           {"bootstrap", spec.forest.bootstrap}};
                break;
        }
    }

    return {{"input", std::move(input)},
            {"imbalance_ratio", {cfg.imbalance_ratio.pos, cfg.imbalance_ratio.neg}},
            {"test_fraction", cfg.test_fraction},
            {"pools", std::move(pools)},
            {"pool_size", cfg.pool_size},
            {"classifiers", std::move(classifiers)},
            {"classifier_params", std::move(classifier_params)},
            {"ga",
             {{"population_size", cfg.ga.population_size},
              {"iterations", cfg.ga.iterations},
              {"crossover_probability", cfg.ga.crossover_probability},
              {"mutation_probability", cfg.ga.mutation_probability},
              {"elite_count", cfg.ga.elite_count}}},
            {"seed", cfg.seed},
            {"repetitions", cfg.repetitions},
            {"fitness_on_test", cfg.fitness_on_test},
            {"validation_fraction", cfg.validation_fraction},
            {"fitness_splits", cfg.fitness_splits},
            {"threads", cfg.threads}};
}

namespace {

// The held-out test rows; every read is counted so the pipeline can assert
// none happened before the evaluation stage.
class GuardedTestSet {
public:
    explicit GuardedTestSet(Dataset data) : data_(std::move(data)) {}
    const Dataset& get() const {
        ++accesses_;
        return data_;
    }
    std::uint64_t accesses() const { return accesses_.load(); }

private:
    Dataset data_;
    mutable std::atomic<std::uint64_t> accesses_{0};
};

MixRatio one_hot_ratio(int pool) {
    MixRatio r{{0.0, 0.0, 0.0}};
    r.r[static_cast<std::size_t>(pool)] = 1.0;
    return r;
}

GaRunSummary summarize_ga(const GaResult& result) {
    GaRunSummary s;
    s.genotype = result.best_genotype.to_string();
    s.ratio = result.best_ratio;
    s.fitness = result.best_fitness;
    s.evaluations = result.stats.evaluations;
    s.cache_hits = result.stats.cache_hits;
    return s;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    cfg.validate();

    ExperimentReport report;
    report.config = cfg;
    report.guard_mode = cfg.fitness_on_test ? "fitness_on_test" : "default";
    for (const auto& spec : cfg.classifiers) {
        ClassifierResult r;
        r.family = spec.family;
        report.results.push_back(std::move(r));
    }

    std::string stage = "setup";
    try {
        std::optional<Dataset> csv_base;
        if (cfg.input.kind == InputSpec::Kind::csv) {
            stage = "load";
            auto loaded = load_smart_csv(cfg.input.csv_path, FeatureSchema::smart_default(),
                                         cfg.input.model_filter);
            if (loaded.dropped() > 0)
                report.warnings.push_back("load: dropped " + std::to_string(loaded.dropped()) +
                                          " rows with missing or unparseable values");
            csv_base = std::move(loaded.data);
        }

        for (int rep = 0; rep < cfg.repetitions; ++rep) {
            const std::string rep_tag = "repetition " + std::to_string(rep) + ": ";
            const std::uint64_t run_seed = derive_seed(cfg.seed, 0x9E99u, rep);

            stage = rep_tag + "load";
            Dataset base = cfg.input.kind == InputSpec::Kind::fixture
                               ? build_fixture(cfg.input.fixture, derive_seed(run_seed, 1))
                               : *csv_base;

            stage = rep_tag + "subsample";
            base = subsample_to_ratio(base, cfg.imbalance_ratio, derive_seed(run_seed, 2));

            stage = rep_tag + "split";
            auto [train_raw, test_raw] =
                stratified_split(base, cfg.test_fraction, derive_seed(run_seed, 3));

            stage = rep_tag + "normalize";
            const NormalizerParams norm = fit_normalizer(train_raw);
            const Dataset train = apply_normalizer(norm, train_raw);
            GuardedTestSet guard(std::move(test_raw));

            stage = rep_tag + "generators";
            const std::size_t n_pos = train.count_label(kPositive);
            const std::size_t n_neg = train.count_label(kNegative);
            if (n_pos >= n_neg)
                throw DataError("training set is not minority-positive: " +
                                std::to_string(n_pos) + " vs " + std::to_string(n_neg));
            const std::size_t need = n_neg - n_pos;
            const std::size_t pool_n = cfg.pool_size > 0 ? cfg.pool_size : need;
            const Dataset minority = train.select(train.indices_of(kPositive));

            std::array<SyntheticPool, kPoolCount> pools;
            std::vector<PoolInfo> pool_infos;
            for (int p = 0; p < kPoolCount; ++p) {
                const auto& spec = cfg.pools[static_cast<std::size_t>(p)];
                if (spec.kind == GeneratorKind::external) {
                    pools[static_cast<std::size_t>(p)] =
                        load_external_pool(spec.external_path, train.schema);
                } else {
                    const auto model = fit_generator(spec.kind, minority, spec.config,
                                                     derive_seed(run_seed, 4, p));
                    pools[static_cast<std::size_t>(p)] =
                        sample_pool(model, pool_n, derive_seed(run_seed, 5, p));
                }
                pool_infos.push_back(PoolInfo{generator_name(spec.kind),
                                              pools[static_cast<std::size_t>(p)].size(),
                                              pools[static_cast<std::size_t>(p)].provenance});
            }

            // fitness folds: fixed inner splits whose pools are fit on that
            // fold's training positives only, so the GA never scores against
            // rows any generator has seen
            stage = rep_tag + "fitness folds";
            std::vector<FitnessFold> folds;
            if (!cfg.fitness_on_test) {
                for (int s = 0; s < cfg.fitness_splits; ++s) {
                    FitnessFold fold;
                    std::tie(fold.train, fold.validation) = stratified_split(
                        train, cfg.validation_fraction, derive_seed(run_seed, 20, s));
                    const std::size_t fold_pos = fold.train.count_label(kPositive);
                    const std::size_t fold_neg = fold.train.count_label(kNegative);
                    if (fold_pos >= fold_neg)
                        throw DataError("fitness fold is not minority-positive");
                    const std::size_t fold_n =
                        cfg.pool_size > 0 ? cfg.pool_size : fold_neg - fold_pos;
                    const Dataset fold_minority =
                        fold.train.select(fold.train.indices_of(kPositive));
                    for (int p = 0; p < kPoolCount; ++p) {
                        const auto& spec = cfg.pools[static_cast<std::size_t>(p)];
                        if (spec.kind == GeneratorKind::external) {
                            fold.pools[static_cast<std::size_t>(p)] =
                                pools[static_cast<std::size_t>(p)];
                        } else {
                            const auto model =
                                fit_generator(spec.kind, fold_minority, spec.config,
                                              derive_seed(run_seed, 21, s, p));
                            fold.pools[static_cast<std::size_t>(p)] =
                                sample_pool(model, fold_n, derive_seed(run_seed, 22, s, p));
                        }
                    }
                    folds.push_back(std::move(fold));
                }
            }

            std::vector<ClassifierRun> rep_runs(cfg.classifiers.size());
            std::vector<std::array<std::unique_ptr<Model>, kVariantCount>> models(
                cfg.classifiers.size());
            std::vector<std::string> rep_warnings;

            auto note_replacement = [&](const AssembledSet& assembled, const std::string& where) {
                for (int p = 0; p < kPoolCount; ++p)
                    if (assembled.with_replacement[static_cast<std::size_t>(p)])
                        rep_warnings.push_back(rep_tag + where + ": pool " +
                                               std::to_string(p + 1) +
                                               " drawn with replacement");
            };

            for (std::size_t ci = 0; ci < cfg.classifiers.size(); ++ci) {
                const ClassifierSpec& spec = cfg.classifiers[ci];
                const std::string family = family_name(spec.family);

                stage = rep_tag + family + ": baseline training";
                models[ci][0] = fit_model(spec, train, derive_seed(run_seed, 10, ci));

                for (int p = 0; p < kPoolCount; ++p) {
                    stage = rep_tag + family + ": pool " + std::to_string(p + 1) + " training";
                    const auto assembled = assemble_balanced_set(
                        train, pools, one_hot_ratio(p), derive_seed(run_seed, 11, ci, p));
                    note_replacement(assembled, family + " pool_" + std::to_string(p + 1));
                    models[ci][static_cast<std::size_t>(1 + p)] =
                        fit_model(spec, assembled.data, derive_seed(run_seed, 12, ci, p));
                }

                stage = rep_tag + family + ": GA search";
                FitnessContext ctx = FitnessContext::for_classifier(
                    train, pools, spec, derive_seed(run_seed, 13, ci));
                ctx.validation_fraction = cfg.validation_fraction;
                ctx.fitness_splits = cfg.fitness_splits;
                ctx.folds = folds;
                if (cfg.fitness_on_test)
                    ctx.external_validation = apply_normalizer(norm, guard.get());

                GaConfig ga_cfg = cfg.ga;
                ga_cfg.seed = derive_seed(run_seed, 14, ci);
                GaRunHooks hooks;
                hooks.progress = options.ga_progress;
                hooks.threads = cfg.threads;
                const GaResult ga = run_ga(ga_cfg, ctx, hooks);
                rep_runs[ci].ga = summarize_ga(ga);
                for (const auto& note : ctx.notes())
                    rep_warnings.push_back(rep_tag + family + ": " + note);

                stage = rep_tag + family + ": optimized training";
                const auto assembled = assemble_balanced_set(train, pools, ga.best_ratio,
                                                             derive_seed(run_seed, 15, ci));
                note_replacement(assembled, family + " ga_optimized");
                models[ci][4] = fit_model(spec, assembled.data, derive_seed(run_seed, 16, ci));
            }

            stage = rep_tag + "evaluation";
            const std::uint64_t pre_eval = guard.accesses();
            if (!cfg.fitness_on_test && pre_eval != 0)
                throw Error("leakage guard tripped: test set was read " +
                            std::to_string(pre_eval) + " times before evaluation");
            for (std::size_t ci = 0; ci < cfg.classifiers.size(); ++ci) {
                for (int v = 0; v < kVariantCount; ++v) {
                    const Dataset test_norm = apply_normalizer(norm, guard.get());
                    const auto predictions =
                        models[ci][static_cast<std::size_t>(v)]->predict(test_norm.rows);
                    rep_runs[ci].variants[static_cast<std::size_t>(v)].cm =
                        confusion_matrix(test_norm.labels, predictions);
                }
            }

            // commit the completed repetition
            report.run_seeds.push_back(run_seed);
            report.pools.push_back(std::move(pool_infos));
            report.guard_pre_eval_accesses.push_back(pre_eval);
            for (std::size_t ci = 0; ci < cfg.classifiers.size(); ++ci)
                report.results[ci].runs.push_back(std::move(rep_runs[ci]));
            report.warnings.insert(report.warnings.end(), rep_warnings.begin(),
                                   rep_warnings.end());
        }
    } catch (const std::exception& e) {
        report.partial = StageFailure{stage, e.what()};
    }

    for (auto& result : report.results) {
        if (result.runs.empty()) continue;
        for (int v = 0; v < kVariantCount; ++v) {
            double sum = 0.0;
            for (const auto& run : result.runs)
                sum += g_mean(run.variants[static_cast<std::size_t>(v)].cm);
            result.mean_g_mean[static_cast<std::size_t>(v)] =
                sum / static_cast<double>(result.runs.size());
        }
        const auto best = std::max_element(
            result.runs.begin(), result.runs.end(),
            [](const ClassifierRun& a, const ClassifierRun& b) {
                return a.ga.fitness < b.ga.fitness;
            });
        result.best = best->ga;
    }

    report.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

namespace {

nlohmann::json variant_metrics_json(const ConfusionMatrix& cm) {
    nlohmann::json j = metrics_to_json(cm);
    j["accuracy"] = accuracy(cm);
    return j;
}

nlohmann::json ga_summary_json(const GaRunSummary& s) {
    return {{"genotype", s.genotype},
            {"ratio", s.ratio.r},
            {"fitness", s.fitness},
            {"evaluations", s.evaluations},
            {"cache_hits", s.cache_hits}};
}

GaRunSummary ga_summary_from_json(const nlohmann::json& j) {
    GaRunSummary s;
    s.genotype = j.at("genotype").get<std::string>();
    s.ratio.r = j.at("ratio").get<std::array<double, kPoolCount>>();
    s.fitness = j.at("fitness").get<double>();
    s.evaluations = j.at("evaluations").get<std::uint64_t>();
    s.cache_hits = j.at("cache_hits").get<std::uint64_t>();
    return s;
}

nlohmann::json report_body_json(const ExperimentReport& report) {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& r : report.results) {
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& run : r.runs) {
            nlohmann::json variants;
            for (int v = 0; v < kVariantCount; ++v)
                variants[kVariantNames[static_cast<std::size_t>(v)]] =
                    variant_metrics_json(run.variants[static_cast<std::size_t>(v)].cm);
            runs.push_back({{"variants", std::move(variants)},
                            {"ga", ga_summary_json(run.ga)}});
        }
        nlohmann::json means;
        for (int v = 0; v < kVariantCount; ++v)
            means[kVariantNames[static_cast<std::size_t>(v)]] =
                r.mean_g_mean[static_cast<std::size_t>(v)];
        results.push_back({{"family", family_name(r.family)},
                           {"mean_g_mean", std::move(means)},
                           {"best", ga_summary_json(r.best)},
                           {"runs", std::move(runs)}});
    }

    nlohmann::json pools = nlohmann::json::array();
    for (const auto& per_run : report.pools) {
        nlohmann::json entry = nlohmann::json::array();
        for (const auto& p : per_run)
            entry.push_back({{"kind", p.kind}, {"size", p.size}, {"provenance", p.provenance}});
        pools.push_back(std::move(entry));
    }

    nlohmann::json body{{"config", config_to_json(report.config)},
                        {"run_seeds", report.run_seeds},
                        {"variants", kVariantNames},
                        {"results", std::move(results)},
                        {"pools", std::move(pools)},
                        {"warnings", report.warnings},
                        {"leakage_guard",
                         {{"mode", report.guard_mode},
                          {"pre_evaluation_test_accesses", report.guard_pre_eval_accesses}}}};
    if (report.partial)
        body["partial"] = {{"stage", report.partial->stage}, {"error", report.partial->error}};
    else
        body["partial"] = nullptr;
    return body;
}

}  // namespace

nlohmann::json report_to_json(const ExperimentReport& report) {
    return {{"body", report_body_json(report)},
            {"timings", {{"total_seconds", report.total_seconds}}}};
}

ExperimentReport report_from_json(const nlohmann::json& j) {
    const auto& body = j.at("body");
    ExperimentReport report;
    report.config = config_from_json(body.at("config"));
    report.run_seeds = body.at("run_seeds").get<std::vector<std::uint64_t>>();
    report.warnings = body.at("warnings").get<std::vector<std::string>>();
    report.guard_mode = body.at("leakage_guard").at("mode").get<std::string>();
    report.guard_pre_eval_accesses = body.at("leakage_guard")
                                         .at("pre_evaluation_test_accesses")
                                         .get<std::vector<std::uint64_t>>();
    for (const auto& pj : body.at("pools")) {
        std::vector<PoolInfo> per_run;
        for (const auto& p : pj)
            per_run.push_back(PoolInfo{p.at("kind").get<std::string>(),
                                       p.at("size").get<std::size_t>(),
                                       p.at("provenance").get<std::string>()});
        report.pools.push_back(std::move(per_run));
    }
    for (const auto& rj : body.at("results")) {
        ClassifierResult result;
        result.family = family_from_name(rj.at("family").get<std::string>());
        for (int v = 0; v < kVariantCount; ++v)
            result.mean_g_mean[static_cast<std::size_t>(v)] =
                rj.at("mean_g_mean").at(kVariantNames[static_cast<std::size_t>(v)]).get<double>();
        result.best = ga_summary_from_json(rj.at("best"));
        for (const auto& runj : rj.at("runs")) {
            ClassifierRun run;
            for (int v = 0; v < kVariantCount; ++v) {
                const auto& m =
                    runj.at("variants").at(kVariantNames[static_cast<std::size_t>(v)]);
                auto& cm = run.variants[static_cast<std::size_t>(v)].cm;
                cm.tp = m.at("tp").get<std::uint64_t>();
                cm.fn = m.at("fn").get<std::uint64_t>();
                cm.fp = m.at("fp").get<std::uint64_t>();
                cm.tn = m.at("tn").get<std::uint64_t>();
            }
            run.ga = ga_summary_from_json(runj.at("ga"));
            result.runs.push_back(std::move(run));
        }
        report.results.push_back(std::move(result));
    }
    if (body.contains("partial") && !body.at("partial").is_null())
        report.partial = StageFailure{body.at("partial").at("stage").get<std::string>(),
                                      body.at("partial").at("error").get<std::string>()};
    if (j.contains("timings"))
        report.total_seconds = j.at("timings").at("total_seconds").get<double>();
    return report;
}

namespace {

std::string format_ratio(const MixRatio& r) {
    std::ostringstream out;
    out.precision(3);
    out << std::fixed << r[0] << ":" << r[1] << ":" << r[2];
    return out.str();
}

std::string render_markdown(const ExperimentReport& report) {
    std::ostringstream out;
    out << "# Experiment report\n\n";
    if (report.partial)
        out << "> **PARTIAL RESULT** — failed at stage `" << report.partial->stage
            << "`: " << report.partial->error << "\n\n";
    out << "- repetitions completed: " << report.run_seeds.size() << "\n";
    out << "- master seed: " << report.config.seed << "\n";
    out << "- fitness mode: " << report.guard_mode << "\n\n";

    out << "## Best mixing ratio per classifier\n\n";
    out << "| Classifier | Mix ratio (pool1:pool2:pool3) | Genotype | Fitness |\n";
    out << "|---|---|---|---|\n";
    for (const auto& r : report.results) {
        if (r.runs.empty()) continue;
        out << "| " << family_name(r.family) << " | " << format_ratio(r.best.ratio) << " | `"
            << r.best.genotype << "` | ";
        out.precision(3);
        out << std::fixed << r.best.fitness << " |\n";
    }

    out << "\n## Mean test G-mean per training variant\n\n";
    out << "| Classifier |";
    for (const auto* name : kVariantNames) out << " " << name << " |";
    out << "\n|---|";
    for (int v = 0; v < kVariantCount; ++v) out << "---|";
    out << "\n";
    for (const auto& r : report.results) {
        out << "| " << family_name(r.family) << " |";
        for (int v = 0; v < kVariantCount; ++v) {
            out.precision(3);
            if (r.runs.empty())
                out << " - |";
            else
                out << " " << std::fixed << r.mean_g_mean[static_cast<std::size_t>(v)] << " |";
        }
        out << "\n";
    }

    if (!report.warnings.empty()) {
        out << "\n## Warnings\n\n";
        for (const auto& w : report.warnings) out << "- " << w << "\n";
    }
    return out.str();
}

std::string render_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "classifier";
    for (const auto* name : kVariantNames) out << "," << name;
    out << "\n";
    out.precision(17);
    for (const auto& r : report.results) {
        out << family_name(r.family);
        for (int v = 0; v < kVariantCount; ++v) {
            out << ",";
            if (!r.runs.empty()) out << r.mean_g_mean[static_cast<std::size_t>(v)];
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace

std::string render_report(const ExperimentReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::json: return report_to_json(report).dump(2) + "\n";
        case ReportFormat::markdown: return render_markdown(report);
        case ReportFormat::csv: return render_csv(report);
    }
    throw ConfigError("unknown report format");
}

}  // namespace gamix
