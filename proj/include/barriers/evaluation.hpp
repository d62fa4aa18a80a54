#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "barriers/common.hpp"
#include "barriers/features.hpp"

namespace barriers {

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 7;
};

struct SplitResult {
    std::vector<std::size_t> train; // sorted ascending
    std::vector<std::size_t> test;
};

// Per class, the train side gets its largest-remainder share of
// round(train_fraction * N); membership within a class comes from a seeded
// shuffle. Classes with a single instance cannot be split.
SplitResult stratified_split(std::span<const std::size_t> labels, const SplitSpec& spec);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct EvalReport {
    std::string barrier;
    std::string category;
    std::string model;
    std::string mode;
    std::vector<std::string> class_names;
    std::vector<ClassMetrics> per_class;
    std::vector<std::vector<std::size_t>> confusion; // [gold][predicted]
    double macro_f1 = 0.0; // unweighted mean over classes with support > 0
    std::size_t test_size = 0;
};

EvalReport f1_report(std::span<const std::size_t> predicted,
                     std::span<const std::size_t> gold,
                     std::span<const std::string> class_names);

struct BarrierSummary {
    std::string barrier;
    std::string model;
    std::string mode;
    double mean_macro_f1 = 0.0;
    std::vector<std::pair<std::string, double>> per_category; // category -> macro F1
};

// Mean macro-F1 grouped by (barrier, model, mode), categories attached.
std::vector<BarrierSummary> aggregate(std::span<const EvalReport> reports);

// Scores an externally produced predictions file (article_id <TAB> label name
// per line) against the gold matrix. The ids must match the matrix rows
// exactly; missing or extra ids are an error listing them.
EvalReport score_external(const std::string& predictions_path, const FeatureMatrix& gold);

} // namespace barriers
