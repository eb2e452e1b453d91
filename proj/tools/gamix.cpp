#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gamix/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::int64_t seed_override = -1;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Experiment config JSON");
    cmd->add_option("--seed", args.seed_override, "Master seed override");
    cmd->add_flag("--quiet", args.quiet, "Suppress GA progress lines on stderr");
}

gamix::ExperimentConfig load_config(const CommonArgs& args) {
    gamix::ExperimentConfig cfg;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw gamix::ConfigError("cannot open config: " + args.config_path);
        cfg = gamix::config_from_json(json::parse(in));
    }
    if (args.seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed_override);
    return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw gamix::Error("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

gamix::Dataset load_prepared(const std::string& path) {
    return gamix::read_feature_csv(path, gamix::FeatureSchema::smart_default(), true);
}

std::array<gamix::SyntheticPool, gamix::kPoolCount> load_pools(const std::string& dir) {
    std::array<gamix::SyntheticPool, gamix::kPoolCount> pools;
    for (int i = 0; i < gamix::kPoolCount; ++i) {
        const fs::path path = fs::path(dir) / ("pool_" + std::to_string(i + 1) + ".csv");
        pools[static_cast<std::size_t>(i)] =
            gamix::load_external_pool(path.string(), gamix::FeatureSchema::smart_default());
    }
    return pools;
}

struct PreparedData {
    gamix::Dataset train;  // normalized
    gamix::Dataset test;   // normalized
    gamix::NormalizerParams norm;
    std::size_t dropped = 0;
};

PreparedData prepare_data(const gamix::ExperimentConfig& cfg) {
    PreparedData out;
    gamix::Dataset base;
    if (cfg.input.kind == gamix::InputSpec::Kind::fixture) {
        base = gamix::build_fixture(cfg.input.fixture, gamix::derive_seed(cfg.seed, 1));
    } else {
        auto loaded = gamix::load_smart_csv(cfg.input.csv_path,
                                            gamix::FeatureSchema::smart_default(),
                                            cfg.input.model_filter);
        out.dropped = loaded.dropped();
        base = std::move(loaded.data);
    }
    base = gamix::subsample_to_ratio(base, cfg.imbalance_ratio, gamix::derive_seed(cfg.seed, 2));
    auto [train_raw, test_raw] =
        gamix::stratified_split(base, cfg.test_fraction, gamix::derive_seed(cfg.seed, 3));
    out.norm = gamix::fit_normalizer(train_raw);
    out.train = gamix::apply_normalizer(out.norm, train_raw);
    out.test = gamix::apply_normalizer(out.norm, test_raw);
    return out;
}

int run_prepare(const CommonArgs& args, const std::string& out_dir) {
    const auto cfg = load_config(args);
    const auto prepared = prepare_data(cfg);
    fs::create_directories(out_dir);

    gamix::write_feature_csv((fs::path(out_dir) / "train.csv").string(), prepared.train, true);
    gamix::write_feature_csv((fs::path(out_dir) / "test.csv").string(), prepared.test, true);
    write_json(fs::path(out_dir) / "normalizer.json",
               gamix::normalizer_to_json(prepared.norm));
    write_json(fs::path(out_dir) / "prepare.json",
               json{{"seed", cfg.seed},
                    {"train_rows", prepared.train.size()},
                    {"train_positives", prepared.train.count_label(gamix::kPositive)},
                    {"test_rows", prepared.test.size()},
                    {"test_positives", prepared.test.count_label(gamix::kPositive)},
                    {"dropped_rows", prepared.dropped}});
    std::cout << "prepared " << prepared.train.size() << " train rows ("
              << prepared.train.count_label(gamix::kPositive) << " positive) and "
              << prepared.test.size() << " test rows into " << out_dir << "\n";
    return 0;
}

int run_generate(const CommonArgs& args, const std::string& train_path,
                 const std::string& out_dir) {
    const auto cfg = load_config(args);
    const auto train = load_prepared(train_path);
    const auto minority = train.select(train.indices_of(gamix::kPositive));
    const std::size_t need =
        train.count_label(gamix::kNegative) - train.count_label(gamix::kPositive);
    const std::size_t pool_n = cfg.pool_size > 0 ? cfg.pool_size : need;
    fs::create_directories(out_dir);

    for (int i = 0; i < gamix::kPoolCount; ++i) {
        const auto& spec = cfg.pools[static_cast<std::size_t>(i)];
        gamix::SyntheticPool pool;
        if (spec.kind == gamix::GeneratorKind::external) {
            pool = gamix::load_external_pool(spec.external_path, train.schema);
        } else {
            const auto model = gamix::fit_generator(spec.kind, minority, spec.config,
                                                    gamix::derive_seed(cfg.seed, 4, i));
            pool = gamix::sample_pool(model, pool_n, gamix::derive_seed(cfg.seed, 5, i));
        }
        const auto name = "pool_" + std::to_string(i + 1);
        gamix::write_pool_csv((fs::path(out_dir) / (name + ".csv")).string(), pool,
                              train.schema);
        write_json(fs::path(out_dir) / (name + "_quality.json"),
                   gamix::pool_quality_to_json(gamix::validate_pool(pool, minority)));
        std::cout << name << ": " << pool.size() << " rows ("
                  << gamix::generator_name(spec.kind) << ")\n";
    }
    return 0;
}

int run_search(const CommonArgs& args, const std::string& train_path,
               const std::string& pools_dir, const std::string& test_path,
               const std::string& classifier, const std::string& out_dir) {
    const auto cfg = load_config(args);
    const auto train = load_prepared(train_path);
    auto pools = load_pools(pools_dir);

    std::vector<gamix::ClassifierSpec> specs;
    if (classifier.empty()) {
        specs = cfg.classifiers;
    } else {
        const auto family = gamix::family_from_name(classifier);
        const auto it = std::find_if(cfg.classifiers.begin(), cfg.classifiers.end(),
                                     [&](const auto& s) { return s.family == family; });
        specs.push_back(it != cfg.classifiers.end() ? *it : gamix::ClassifierSpec::make(family));
    }

    fs::create_directories(out_dir);
    for (std::size_t ci = 0; ci < specs.size(); ++ci) {
        auto ctx = gamix::FitnessContext::for_classifier(train, pools, specs[ci],
                                                         gamix::derive_seed(cfg.seed, 13, ci));
        ctx.validation_fraction = cfg.validation_fraction;
        ctx.fitness_splits = cfg.fitness_splits;
        if (cfg.fitness_on_test) {
            if (test_path.empty())
                throw gamix::ConfigError("fitness_on_test needs --test");
            ctx.external_validation = load_prepared(test_path);
        }
        gamix::GaConfig ga_cfg = cfg.ga;
        ga_cfg.seed = gamix::derive_seed(cfg.seed, 14, ci);
        gamix::GaRunHooks hooks;
        hooks.threads = cfg.threads;
        if (!args.quiet) hooks.progress = &std::cerr;

        const auto result = gamix::run_ga(ga_cfg, ctx, hooks);
        const auto family = gamix::family_name(specs[ci].family);
        json out = gamix::ga_result_to_json(result);
        out["classifier"] = family;
        out["notes"] = ctx.notes();
        const fs::path path = fs::path(out_dir) / ("search_" + family + ".json");
        write_json(path, out);
        std::cout << family << ": best ratio " << result.best_ratio[0] << ":"
                  << result.best_ratio[1] << ":" << result.best_ratio[2] << " fitness "
                  << result.best_fitness << " -> " << path.string() << "\n";
    }
    return 0;
}

int run_evaluate(const CommonArgs& args, const std::string& train_path,
                 const std::string& test_path, const std::string& pools_dir,
                 const std::string& classifier, const std::string& ratio_text,
                 const std::string& out_path, const std::string& model_path) {
    const auto cfg = load_config(args);
    const auto train = load_prepared(train_path);
    const auto test = load_prepared(test_path);
    const auto pools = load_pools(pools_dir);

    const auto family = gamix::family_from_name(classifier);
    auto it = std::find_if(cfg.classifiers.begin(), cfg.classifiers.end(),
                           [&](const auto& s) { return s.family == family; });
    const auto spec =
        it != cfg.classifiers.end() ? *it : gamix::ClassifierSpec::make(family);

    std::array<double, 3> parts{};
    if (std::sscanf(ratio_text.c_str(), "%lf,%lf,%lf", &parts[0], &parts[1], &parts[2]) != 3)
        throw gamix::ConfigError("--ratio must look like 0.4,0.2,0.4");
    const auto ratio = gamix::MixRatio::normalized(parts[0], parts[1], parts[2]);

    const auto assembled =
        gamix::assemble_balanced_set(train, pools, ratio, gamix::derive_seed(cfg.seed, 15));
    const auto model = gamix::fit_model(spec, assembled.data, gamix::derive_seed(cfg.seed, 16));
    if (!model_path.empty()) write_json(model_path, model->to_json());
    const auto predictions = model->predict(test.rows);
    const auto cm = gamix::confusion_matrix(test.labels, predictions);

    json out = gamix::metrics_to_json(cm);
    out["accuracy"] = gamix::accuracy(cm);
    out["classifier"] = gamix::family_name(family);
    out["ratio"] = ratio.r;
    out["train_rows"] = assembled.data.size();
    if (out_path.empty())
        std::cout << out.dump(2) << "\n";
    else
        write_json(out_path, out);
    std::cout << "g_mean " << gamix::g_mean(cm) << " on " << test.size() << " test rows\n";
    return 0;
}

int run_report(const CommonArgs& args, const std::string& out_dir) {
    const auto cfg = load_config(args);
    gamix::RunOptions options;
    if (!args.quiet) options.ga_progress = &std::cerr;

    const auto report = gamix::run_experiment(cfg, options);
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "report.json",
               gamix::render_report(report, gamix::ReportFormat::json));
    write_text(fs::path(out_dir) / "report.md",
               gamix::render_report(report, gamix::ReportFormat::markdown));
    write_text(fs::path(out_dir) / "report.csv",
               gamix::render_report(report, gamix::ReportFormat::csv));

    std::cout << gamix::render_report(report, gamix::ReportFormat::markdown);
    std::cout << "\nwrote report.{json,md,csv} to " << out_dir << "\n";
    if (report.partial) {
        std::cerr << "stage failure: " << report.partial->stage << ": "
                  << report.partial->error << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GA-optimized mixing of synthetic minority pools for imbalanced "
                 "tabular classification"};
    app.require_subcommand(1);

    CommonArgs prepare_args, generate_args, search_args, evaluate_args, report_args;
    std::string prepare_out = "gamix_out/prepared";
    std::string generate_train, generate_out = "gamix_out/pools";
    std::string search_train, search_pools, search_test, search_classifier,
        search_out = "gamix_out/search";
    std::string eval_train, eval_test, eval_pools, eval_classifier, eval_ratio, eval_out,
        eval_model;
    std::string report_out = "gamix_out/report";

    auto* prepare = app.add_subcommand("prepare", "Ingest, normalize and split the dataset");
    add_common(prepare, prepare_args);
    prepare->add_option("--out-dir", prepare_out, "Output directory");

    auto* generate = app.add_subcommand("generate", "Fit generators and emit pool CSVs");
    add_common(generate, generate_args);
    generate->add_option("--train", generate_train, "Prepared train.csv")->required();
    generate->add_option("--out-dir", generate_out, "Output directory");

    auto* search = app.add_subcommand("search", "Run the GA and emit its result JSON");
    add_common(search, search_args);
    search->add_option("--train", search_train, "Prepared train.csv")->required();
    search->add_option("--pools", search_pools, "Directory with pool_{1,2,3}.csv")->required();
    search->add_option("--test", search_test, "Prepared test.csv (fitness_on_test mode only)");
    search->add_option("--classifier", search_classifier,
                       "Single classifier family (default: every configured one)");
    search->add_option("--out-dir", search_out, "Output directory");

    auto* evaluate = app.add_subcommand("evaluate", "Train on an explicit mix and score");
    add_common(evaluate, evaluate_args);
    evaluate->add_option("--train", eval_train, "Prepared train.csv")->required();
    evaluate->add_option("--test", eval_test, "Prepared test.csv")->required();
    evaluate->add_option("--pools", eval_pools, "Directory with pool_{1,2,3}.csv")->required();
    evaluate->add_option("--classifier", eval_classifier, "Classifier family")->required();
    evaluate->add_option("--ratio", eval_ratio, "Mix ratio, e.g. 0.4,0.2,0.4")->required();
    evaluate->add_option("--out", eval_out, "Metrics JSON path (default: stdout)");
    evaluate->add_option("--save-model", eval_model, "Write the trained model as JSON");

    auto* report = app.add_subcommand("report", "Run the full experiment matrix");
    add_common(report, report_args);
    report->add_option("--out-dir", report_out, "Output directory");

    try {
        app.parse(argc, argv);
        if (prepare->parsed()) return run_prepare(prepare_args, prepare_out);
        if (generate->parsed()) return run_generate(generate_args, generate_train, generate_out);
        if (search->parsed())
            return run_search(search_args, search_train, search_pools, search_test,
                              search_classifier, search_out);
        if (evaluate->parsed())
            return run_evaluate(evaluate_args, eval_train, eval_test, eval_pools,
                                eval_classifier, eval_ratio, eval_out, eval_model);
        if (report->parsed()) return run_report(report_args, report_out);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const gamix::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
