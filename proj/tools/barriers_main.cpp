#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "barriers/pipeline.hpp"

namespace {

using namespace barriers;

struct CliArgs {
    std::string config_path;
    ConfigOverrides overrides;
    std::string external_path;
};

RunConfig make_config(const CliArgs& args) {
    RunConfig config = args.config_path.empty() ? default_config()
                                                : load_config(args.config_path);
    apply_overrides(config, args.overrides);
    validate_config(config);
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"News-spreading barrier annotation, analysis, and classification"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    CliArgs args;
    std::uint64_t seed_value = 0;
    std::string barriers_csv;
    std::string categories_csv;
    std::string mode_value;
    std::string models_csv;
    std::string out_dir;

    app.add_option("--config", args.config_path, "Run configuration JSON file");
    auto* seed_opt = app.add_option("--seed", seed_value, "Master random seed");
    auto* barrier_opt =
        app.add_option("--barrier", barriers_csv, "Comma-separated barrier list");
    auto* category_opt =
        app.add_option("--category", categories_csv, "Comma-separated category list");
    auto* mode_opt = app.add_option("--mode", mode_value, "Feature mode: plain|augmented");
    auto* model_opt = app.add_option("--model", models_csv, "Comma-separated model list");
    auto* out_opt = app.add_option("--out", out_dir, "Output directory");

    CLI::App* ingest = app.add_subcommand("ingest", "Load, validate, and group articles");
    CLI::App* annotate = app.add_subcommand("annotate", "Assign barrier labels per event");
    CLI::App* sentiment =
        app.add_subcommand("sentiment", "Score headlines; emit distributions and trends");
    CLI::App* inferences =
        app.add_subcommand("inferences", "Relation statistics and class intersections");
    CLI::App* featurize =
        app.add_subcommand("featurize", "Build and export TF-IDF train/test matrices");
    CLI::App* train_cmd = app.add_subcommand("train", "Train classifiers per task");
    CLI::App* evaluate = app.add_subcommand("evaluate", "Score models; emit reports");
    evaluate->add_option("--external", args.external_path,
                         "Score an external predictions file instead of trained models");
    CLI::App* report = app.add_subcommand("report", "Gather the analysis tables");
    CLI::App* pipeline = app.add_subcommand("pipeline", "Run every stage in order");

    CLI11_PARSE(app, argc, argv);

    if (*seed_opt) args.overrides.seed = seed_value;
    if (*barrier_opt) args.overrides.barriers = barriers_csv;
    if (*category_opt) args.overrides.categories = categories_csv;
    if (*mode_opt) args.overrides.mode = mode_value;
    if (*model_opt) args.overrides.models = models_csv;
    if (*out_opt) args.overrides.out_dir = out_dir;

    try {
        const RunConfig config = make_config(args);
        if (ingest->parsed()) {
            run_ingest(config);
        } else if (annotate->parsed()) {
            run_annotate(config);
        } else if (sentiment->parsed()) {
            run_sentiment(config);
        } else if (inferences->parsed()) {
            run_inferences(config);
        } else if (featurize->parsed()) {
            run_featurize(config);
        } else if (train_cmd->parsed()) {
            run_train(config);
        } else if (evaluate->parsed()) {
            if (!args.external_path.empty()) {
                // The flags select one featurized task here; they must not
                // reshape the config, or its hash would no longer match the
                // artifacts being scored.
                ConfigOverrides keep = args.overrides;
                keep.barriers.reset();
                keep.categories.reset();
                keep.mode.reset();
                RunConfig base = args.config_path.empty() ? default_config()
                                                          : load_config(args.config_path);
                apply_overrides(base, keep);
                validate_config(base);

                auto pick = [](const auto& list, const std::optional<std::string>& flag,
                               auto parse, const char* what) {
                    if (flag) {
                        const auto parsed = parse(trim(*flag));
                        if (!parsed)
                            throw ValidationError(std::string("unknown ") + what + " \"" +
                                                  *flag + "\"");
                        return *parsed;
                    }
                    if (list.size() != 1)
                        throw ValidationError(
                            std::string("--external needs exactly one ") + what +
                            "; pass --" + what);
                    return list[0];
                };
                const BarrierKind barrier =
                    pick(base.barriers, args.overrides.barriers, parse_barrier, "barrier");
                const Category category = pick(base.categories, args.overrides.categories,
                                               parse_category, "category");
                const FeatureMode mode =
                    pick(base.modes, args.overrides.mode, parse_feature_mode, "mode");
                const EvalReport r =
                    run_external_score(base, args.external_path, barrier, category, mode);
                std::printf("external macro_f1=%.6f over %zu test rows\n", r.macro_f1,
                            r.test_size);
            } else {
                run_evaluate(config);
            }
        } else if (report->parsed()) {
            run_report(config);
        } else if (pipeline->parsed()) {
            run_pipeline(config);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
