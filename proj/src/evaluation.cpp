#include "barriers/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "barriers/rng.hpp"

namespace barriers {

SplitResult stratified_split(std::span<const std::size_t> labels, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0) || !(spec.train_fraction < 1.0))
        throw ValidationError("train_fraction must lie strictly between 0 and 1");
    if (labels.empty()) throw ValidationError("cannot split an empty label vector");

    std::map<std::size_t, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    if (by_class.size() < 2)
        throw ValidationError("cannot stratify a single-class label vector");
    for (const auto& [cls, members] : by_class)
        if (members.size() < 2)
            throw ValidationError("unsplittable class " + std::to_string(cls) +
                                  " with a single instance; merge or drop it first");

    // Largest-remainder apportionment of round(f * N) train seats.
    const auto total_train = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(labels.size())));
    struct Quota {
        std::size_t cls;
        std::size_t floor_seats;
        double remainder;
    };
    std::vector<Quota> quotas;
    std::size_t assigned = 0;
    for (const auto& [cls, members] : by_class) {
        const double exact = spec.train_fraction * static_cast<double>(members.size());
        const auto floor_seats = static_cast<std::size_t>(exact);
        quotas.push_back({cls, floor_seats, exact - static_cast<double>(floor_seats)});
        assigned += floor_seats;
    }
    std::stable_sort(quotas.begin(), quotas.end(), [](const Quota& a, const Quota& b) {
        if (a.remainder != b.remainder) return a.remainder > b.remainder;
        return a.cls < b.cls;
    });
    std::map<std::size_t, std::size_t> train_counts;
    for (const Quota& q : quotas) train_counts[q.cls] = q.floor_seats;
    for (std::size_t i = 0; assigned < total_train && i < quotas.size(); ++i) {
        ++train_counts[quotas[i].cls];
        ++assigned;
    }

    Rng rng(spec.seed);
    SplitResult result;
    for (auto& [cls, members] : by_class) {
        rng.shuffle(members);
        const std::size_t take = std::min(train_counts[cls], members.size());
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < take ? result.train : result.test).push_back(members[i]);
    }
    std::sort(result.train.begin(), result.train.end());
    std::sort(result.test.begin(), result.test.end());
    return result;
}

EvalReport f1_report(std::span<const std::size_t> predicted,
                     std::span<const std::size_t> gold,
                     std::span<const std::string> class_names) {
    if (predicted.size() != gold.size())
        throw ValidationError("predicted/gold length mismatch: " +
                              std::to_string(predicted.size()) + " vs " +
                              std::to_string(gold.size()));
    if (gold.empty()) throw ValidationError("cannot evaluate an empty label vector");

    const std::size_t n_classes = class_names.size();
    EvalReport report;
    report.class_names.assign(class_names.begin(), class_names.end());
    report.test_size = gold.size();
    report.confusion.assign(n_classes, std::vector<std::size_t>(n_classes, 0));
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] >= n_classes || predicted[i] >= n_classes)
            throw ValidationError("label id out of range of the class table");
        ++report.confusion[gold[i]][predicted[i]];
    }

    report.per_class.resize(n_classes);
    double f1_sum = 0.0;
    std::size_t f1_count = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        std::size_t tp = report.confusion[c][c];
        std::size_t fp = 0;
        std::size_t fn = 0;
        for (std::size_t o = 0; o < n_classes; ++o) {
            if (o == c) continue;
            fp += report.confusion[o][c];
            fn += report.confusion[c][o];
        }
        ClassMetrics& m = report.per_class[c];
        m.support = tp + fn;
        if (m.support == 0) continue; // absent from gold: all zero, out of macro
        m.precision = tp + fp == 0 ? 0.0
                                   : static_cast<double>(tp) / static_cast<double>(tp + fp);
        m.recall = static_cast<double>(tp) / static_cast<double>(m.support);
        m.f1 = m.precision + m.recall == 0.0
                   ? 0.0
                   : 2.0 * m.precision * m.recall / (m.precision + m.recall);
        f1_sum += m.f1;
        ++f1_count;
    }
    report.macro_f1 = f1_count == 0 ? 0.0 : f1_sum / static_cast<double>(f1_count);
    return report;
}

std::vector<BarrierSummary> aggregate(std::span<const EvalReport> reports) {
    std::map<std::tuple<std::string, std::string, std::string>,
             std::vector<std::pair<std::string, double>>>
        groups;
    for (const EvalReport& report : reports)
        groups[{report.barrier, report.model, report.mode}].emplace_back(report.category,
                                                                         report.macro_f1);

    std::vector<BarrierSummary> summaries;
    for (auto& [key, per_category] : groups) {
        std::sort(per_category.begin(), per_category.end());
        BarrierSummary summary;
        summary.barrier = std::get<0>(key);
        summary.model = std::get<1>(key);
        summary.mode = std::get<2>(key);
        double sum = 0.0;
        for (const auto& [category, f1] : per_category) sum += f1;
        summary.mean_macro_f1 = sum / static_cast<double>(per_category.size());
        summary.per_category = std::move(per_category);
        summaries.push_back(std::move(summary));
    }
    return summaries;
}

EvalReport score_external(const std::string& predictions_path, const FeatureMatrix& gold) {
    std::map<std::string, std::string> predictions; // article_id -> label name
    std::size_t line_no = 0;
    for (const std::string& line : read_lines(predictions_path)) {
        ++line_no;
        if (trim(line).empty() || line[0] == '#') continue;
        const auto cells = split(line, '\t');
        if (cells.size() < 2)
            throw ValidationError(predictions_path + " line " + std::to_string(line_no) +
                                  ": expected article_id <TAB> label");
        const std::string id = trim(cells[0]);
        if (predictions.count(id))
            throw ValidationError(predictions_path + ": duplicate prediction for \"" + id +
                                  "\"");
        predictions[id] = trim(cells[1]);
    }

    std::set<std::string> gold_ids(gold.row_keys.begin(), gold.row_keys.end());
    std::string missing;
    std::string extra;
    for (const std::string& id : gold_ids)
        if (!predictions.count(id)) missing += (missing.empty() ? "" : ", ") + id;
    for (const auto& [id, label] : predictions)
        if (!gold_ids.count(id)) extra += (extra.empty() ? "" : ", ") + id;
    if (!missing.empty() || !extra.empty()) {
        std::string message = "external predictions do not match the gold matrix";
        if (!missing.empty()) message += "; missing ids: " + missing;
        if (!extra.empty()) message += "; extra ids: " + extra;
        throw ValidationError(message);
    }

    std::map<std::string, std::size_t> class_ids;
    for (std::size_t c = 0; c < gold.class_names.size(); ++c)
        class_ids[gold.class_names[c]] = c;

    std::vector<std::size_t> predicted;
    predicted.reserve(gold.row_keys.size());
    for (std::size_t r = 0; r < gold.row_keys.size(); ++r) {
        const std::string& label = predictions[gold.row_keys[r]];
        const auto it = class_ids.find(label);
        if (it == class_ids.end())
            throw ValidationError("unknown label \"" + label + "\" for article \"" +
                                  gold.row_keys[r] + "\"");
        predicted.push_back(it->second);
    }
    return f1_report(predicted, gold.labels, gold.class_names);
}

} // namespace barriers
