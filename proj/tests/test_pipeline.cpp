#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "barriers/pipeline.hpp"
#include "helpers.hpp"

using namespace barriers;
using namespace test_helpers;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("pipeline");

namespace {

// A miniature but complete input set: two countries, four publishers, twelve
// events in one category, every article with one triple.
struct MiniFixture {
    fs::path dir;
    RunConfig config;

    explicit MiniFixture(const std::string& name) {
        dir = temp_dir("pipeline_" + name);

        std::string articles;
        for (int e = 0; e < 12; ++e) {
            const bool crossed = e % 2 == 0;
            for (int a = 0; a < 2; ++a) {
                const std::string id = "a" + std::to_string(e) + "_" + std::to_string(a);
                const std::string domain = crossed && a == 1 ? "far1.example"
                                           : a == 1          ? "near2.example"
                                                             : "near1.example";
                const char* word = crossed ? "crisis" : "win";
                articles += R"({"article_id":")" + id + R"(","event_id":"e)" +
                            std::to_string(e) + R"(","title":"headline )" + word + " " +
                            std::to_string(e) +
                            R"(","publisher_domain":")" + domain +
                            R"(","published_at":"2020-01-0)" + std::to_string(1 + a) +
                            R"(T00:00:00Z","category":"society"})" + "\n";
            }
        }
        write_file(dir / "articles.jsonl", articles);

        write_file(dir / "publishers.tsv",
                   "near1.example\tHomeland\tEnglish\tneutral\n"
                   "near2.example\tHomeland\tEnglish\tleft-wing\n"
                   "far1.example\tFarland\tEnglish\tneutral\n"
                   "far2.example\tFarland\tSpanish\tconservatism\n");

        std::string countries = "Homeland";
        for (int i = 0; i < 6; ++i) countries += "\t10";
        for (int i = 0; i < 12; ++i) countries += "\t20";
        countries += "\nFarland";
        for (int i = 0; i < 6; ++i) countries += "\t90";
        for (int i = 0; i < 12; ++i) countries += "\t80";
        countries += "\n";
        write_file(dir / "countries.tsv", countries);

        std::string inferences;
        for (int e = 0; e < 12; ++e)
            for (int a = 0; a < 2; ++a)
                inferences += "a" + std::to_string(e) + "_" + std::to_string(a) +
                              "\treact\t" + (e % 2 == 0 ? "worried abroad" : "pleased locally") +
                              "\n";
        write_file(dir / "inferences.tsv", inferences);

        write_file(dir / "lexicon.tsv", "win\t2.8\ncrisis\t-3.1\n");
        write_file(dir / "negators.txt", "not\n");
        write_file(dir / "boosters.tsv", "very\t0.293\n");
        write_file(dir / "stopwords.txt", "the\na\nto\n");

        config = default_config();
        config.paths.articles = (dir / "articles.jsonl").string();
        config.paths.publishers = (dir / "publishers.tsv").string();
        config.paths.countries = (dir / "countries.tsv").string();
        config.paths.inferences = (dir / "inferences.tsv").string();
        config.paths.lexicon = (dir / "lexicon.tsv").string();
        config.paths.negators = (dir / "negators.txt").string();
        config.paths.boosters = (dir / "boosters.tsv").string();
        config.paths.stopwords = (dir / "stopwords.txt").string();
        config.paths.out_dir = (dir / "out").string();
        config.barriers = {BarrierKind::geographical};
        config.categories = {Category::society};
        config.models = {ModelKind::logreg};
        config.split.train_fraction = 0.5; // 12 rows split 6/6
        config.seed = 5;
        config.hyperparams.seed = 5;
        config.split.seed = 5;
    }
};

std::string read_all(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return content;
}

} // namespace

TEST_CASE("config validation names the missing path") {
    MiniFixture f("missing_path");
    f.config.paths.countries = (f.dir / "nope.tsv").string();
    CHECK_THROWS_WITH_AS(validate_config(f.config), doctest::Contains("nope.tsv"),
                         ValidationError);
}

TEST_CASE("config files load with overrides and path resolution") {
    MiniFixture f("config_load");
    const std::string config_json = R"({
        "paths": {
            "articles": "articles.jsonl",
            "publishers": "publishers.tsv",
            "countries": "countries.tsv",
            "inferences": "inferences.tsv",
            "lexicon": "lexicon.tsv",
            "negators": "negators.txt",
            "boosters": "boosters.tsv",
            "stopwords": "stopwords.txt",
            "out_dir": "out"
        },
        "barriers": ["geographical", "linguistic"],
        "categories": ["society"],
        "models": ["logreg", "naive-bayes"],
        "seed": 11,
        "hyperparams": {"logreg": {"epochs": 17}}
    })";
    const std::string path = write_file(f.dir / "config.json", config_json);
    RunConfig config = load_config(path);
    CHECK(config.paths.articles == (f.dir / "articles.jsonl").string());
    CHECK(config.barriers.size() == 2);
    CHECK(config.models.size() == 2);
    CHECK(config.seed == 11);
    CHECK(config.hyperparams.seed == 11);
    CHECK(config.hyperparams.logreg.epochs == 17);

    ConfigOverrides overrides;
    overrides.seed = 99;
    overrides.barriers = "geographical";
    overrides.mode = "plain";
    apply_overrides(config, overrides);
    CHECK(config.seed == 99);
    CHECK(config.split.seed == 99);
    CHECK(config.barriers.size() == 1);
    CHECK(config.modes == std::vector<FeatureMode>{FeatureMode::plain});
}

TEST_CASE("unknown config keys are rejected") {
    MiniFixture f("config_unknown");
    const std::string path = write_file(f.dir / "config.json", R"({"sed": 11})");
    CHECK_THROWS_WITH_AS(load_config(path), doctest::Contains("sed"), ValidationError);
}

TEST_CASE("config hash is stable and sensitive") {
    MiniFixture f("config_hash");
    const std::string base = config_hash(f.config);
    CHECK(base == config_hash(f.config));
    RunConfig changed = f.config;
    changed.seed = f.config.seed + 1;
    CHECK(base != config_hash(changed));
    RunConfig different_threshold = f.config;
    different_threshold.sentiment.positive_threshold = 0.06;
    CHECK(base != config_hash(different_threshold));
    // the output directory is not part of the identity
    RunConfig moved = f.config;
    moved.paths.out_dir = "/tmp/elsewhere";
    CHECK(base == config_hash(moved));
}

TEST_CASE("stages refuse to run out of order") {
    MiniFixture f("stage_order");
    validate_config(f.config);
    CHECK_THROWS_WITH_AS(run_annotate(f.config), doctest::Contains("ingest"),
                         ValidationError);
}

TEST_CASE("stages refuse artifacts from a different configuration") {
    MiniFixture f("stage_hash");
    validate_config(f.config);
    run_ingest(f.config);
    RunConfig changed = f.config;
    changed.seed = 777;
    changed.hyperparams.seed = 777;
    changed.split.seed = 777;
    CHECK_THROWS_WITH_AS(run_annotate(changed), doctest::Contains("different config"),
                         ValidationError);
}

TEST_CASE("the full pipeline produces the expected artifacts and beats chance") {
    MiniFixture f("full_run");
    validate_config(f.config);
    run_pipeline(f.config);

    const fs::path out = f.config.paths.out_dir;
    for (const char* artifact :
         {"ingest/articles.jsonl", "ingest/rejections.tsv", "annotate/annotations.tsv",
          "sentiment/scores.tsv", "sentiment/distributions.tsv", "sentiment/trends.tsv",
          "inferences/relation_stats.tsv", "inferences/venn.tsv",
          "features/geographical.society.plain.train.triplets.tsv",
          "features/geographical.society.augmented.test.labels.tsv",
          "models/geographical.society.plain.logreg.model", "eval/macro.tsv",
          "eval/summaries.tsv", "report/label_distribution.tsv",
          "report/barrier_summaries.tsv", "manifest.json"})
        CHECK_MESSAGE(fs::exists(out / artifact), artifact);

    // every event is labeled for the geographic barrier; half cross
    const std::string annotations = read_all(out / "annotate/annotations.tsv");
    CHECK(annotations.find("Crossed-GB") != std::string::npos);
    CHECK(annotations.find("Not-crossed-GB") != std::string::npos);

    // the sentiment words were planted: crossed events negative, others positive
    const std::string distributions = read_all(out / "sentiment/distributions.tsv");
    CHECK(distributions.find("Crossed-GB\t0\t0\t12") != std::string::npos);
    CHECK(distributions.find("Not-crossed-GB\t12\t0\t0") != std::string::npos);
}

TEST_CASE("reruns with the same seed are byte-identical; external scoring works") {
    MiniFixture f("determinism");
    validate_config(f.config);
    run_pipeline(f.config);
    const std::string first = read_all(fs::path(f.config.paths.out_dir) / "eval/macro.tsv");
    const std::string first_manifest =
        read_all(fs::path(f.config.paths.out_dir) / "manifest.json");

    RunConfig rerun = f.config;
    rerun.paths.out_dir = (f.dir / "out2").string();
    validate_config(rerun);
    run_pipeline(rerun);
    CHECK(first == read_all(fs::path(rerun.paths.out_dir) / "eval/macro.tsv"));
    CHECK(first_manifest == read_all(fs::path(rerun.paths.out_dir) / "manifest.json"));

    // external predictions echoing the exported gold labels score macro-F1 1
    const fs::path labels_path = fs::path(f.config.paths.out_dir) /
                                 "features/geographical.society.plain.test.labels.tsv";
    std::string predictions;
    for (const std::string& line : read_lines(labels_path.string())) {
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line, '\t');
        predictions += cells[1] + "\t" + cells[3] + "\n";
    }
    const std::string predictions_path = write_file(f.dir / "preds.tsv", predictions);
    const EvalReport report =
        run_external_score(f.config, predictions_path, BarrierKind::geographical,
                           Category::society, FeatureMode::plain);
    CHECK(report.macro_f1 == doctest::Approx(1.0));
}

TEST_SUITE_END();
