#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "barriers/common.hpp"
#include "barriers/corpus.hpp"
#include "barriers/evaluation.hpp"
#include "barriers/features.hpp"
#include "barriers/inference.hpp"
#include "barriers/labels.hpp"
#include "barriers/models.hpp"
#include "barriers/sentiment.hpp"

namespace barriers {

// When articles without commonsense triples are removed: once at ingest for
// every downstream stage, only when per-barrier datasets are built, or never.
enum class InferenceFilter { global, per_barrier, off };

std::string_view inference_filter_name(InferenceFilter f);
std::optional<InferenceFilter> parse_inference_filter(std::string_view name);

struct RunPaths {
    std::string articles;
    std::string publishers;
    std::string countries;
    std::string inferences;
    std::string lexicon;
    std::string negators;
    std::string boosters;
    std::string stopwords;
    std::string alignment_synonyms; // optional
    std::string out_dir = "out";
};

struct RunConfig {
    RunPaths paths;
    std::vector<BarrierKind> barriers;   // default: all five
    std::vector<Category> categories;    // default: all ten
    std::vector<FeatureMode> modes;      // default: plain and augmented
    std::vector<ModelKind> models;       // default: logreg
    Hyperparams hyperparams;
    SplitSpec split;
    SentimentConfig sentiment;
    double trend_tolerance = 5.0;
    InferenceFilter inference_filter = InferenceFilter::global;
    RelationTable relations = RelationTable::defaults();
    std::uint64_t seed = 7;
};

// Reads the JSON run configuration; relative paths resolve against the
// config file's directory. Unknown keys are an error.
RunConfig load_config(const std::string& path);
RunConfig default_config();

struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> barriers;   // comma-separated
    std::optional<std::string> categories;
    std::optional<std::string> mode;
    std::optional<std::string> models;
    std::optional<std::string> out_dir;
};

void apply_overrides(RunConfig& config, const ConfigOverrides& overrides);

// Hash of the canonical JSON rendering of the effective configuration; every
// artifact carries it so mixed-config artifacts are refused.
std::string config_hash(const RunConfig& config);

// Checks input paths and creates the output directory. Throws naming the
// offending path.
void validate_config(const RunConfig& config);

void run_ingest(const RunConfig& config);
void run_annotate(const RunConfig& config);
void run_sentiment(const RunConfig& config);
void run_inferences(const RunConfig& config);
void run_featurize(const RunConfig& config);
void run_train(const RunConfig& config);
void run_evaluate(const RunConfig& config);
void run_report(const RunConfig& config);
void run_pipeline(const RunConfig& config);

// Scores an external predictions file against one task's exported test split.
EvalReport run_external_score(const RunConfig& config, const std::string& predictions_path,
                              BarrierKind barrier, Category category, FeatureMode mode);

} // namespace barriers
