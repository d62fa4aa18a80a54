#include "barriers/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "barriers/labeler.hpp"

namespace barriers {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view inference_filter_name(InferenceFilter f) {
    switch (f) {
    case InferenceFilter::global: return "global";
    case InferenceFilter::per_barrier: return "per-barrier";
    case InferenceFilter::off: return "off";
    }
    return "";
}

std::optional<InferenceFilter> parse_inference_filter(std::string_view name) {
    if (name == "global") return InferenceFilter::global;
    if (name == "per-barrier" || name == "per_barrier") return InferenceFilter::per_barrier;
    if (name == "off") return InferenceFilter::off;
    return std::nullopt;
}

RunConfig default_config() {
    RunConfig config;
    config.barriers.assign(kAllBarriers.begin(), kAllBarriers.end());
    config.categories.assign(all_categories().begin(), all_categories().end());
    config.modes = {FeatureMode::plain, FeatureMode::augmented};
    config.models = {ModelKind::logreg};
    return config;
}

namespace {

void check_keys(const json& object, const std::set<std::string>& allowed,
                const std::string& where) {
    for (const auto& [key, value] : object.items())
        if (!allowed.count(key))
            throw ValidationError("unknown config key \"" + key + "\" in " + where);
}

std::string resolve(const fs::path& base, const std::string& value) {
    if (value.empty()) return value;
    const fs::path p(value);
    return p.is_absolute() ? p.string() : (base / p).lexically_normal().string();
}

template <typename T>
std::vector<T> parse_list(const json& array, const std::string& where,
                          std::optional<T> (*parse)(std::string_view)) {
    std::vector<T> out;
    for (const auto& item : array) {
        const std::string name = item.get<std::string>();
        const auto parsed = parse(name);
        if (!parsed) throw ValidationError("unknown " + where + " \"" + name + "\"");
        out.push_back(*parsed);
    }
    if (out.empty()) throw ValidationError(where + " list is empty");
    return out;
}

void load_hyperparams(const json& object, Hyperparams& hp) {
    check_keys(object, {"mlp", "logreg", "svc", "knn", "tree", "nb"}, "hyperparams");
    if (object.contains("mlp")) {
        const json& m = object["mlp"];
        check_keys(m,
                   {"hidden_layers", "hidden_units", "epochs", "batch_size", "dropout",
                    "learning_rate", "beta1", "beta2", "epsilon"},
                   "hyperparams.mlp");
        hp.mlp.hidden_layers = m.value("hidden_layers", hp.mlp.hidden_layers);
        hp.mlp.hidden_units = m.value("hidden_units", hp.mlp.hidden_units);
        hp.mlp.epochs = m.value("epochs", hp.mlp.epochs);
        hp.mlp.batch_size = m.value("batch_size", hp.mlp.batch_size);
        hp.mlp.dropout = m.value("dropout", hp.mlp.dropout);
        hp.mlp.adam.learning_rate = m.value("learning_rate", hp.mlp.adam.learning_rate);
        hp.mlp.adam.beta1 = m.value("beta1", hp.mlp.adam.beta1);
        hp.mlp.adam.beta2 = m.value("beta2", hp.mlp.adam.beta2);
        hp.mlp.adam.epsilon = m.value("epsilon", hp.mlp.adam.epsilon);
    }
    auto load_linear = [&](const char* key, LinearHyperparams& lh) {
        if (!object.contains(key)) return;
        const json& m = object[key];
        check_keys(m, {"l2", "epochs", "learning_rate", "batch_size"},
                   std::string("hyperparams.") + key);
        lh.l2 = m.value("l2", lh.l2);
        lh.epochs = m.value("epochs", lh.epochs);
        lh.learning_rate = m.value("learning_rate", lh.learning_rate);
        lh.batch_size = m.value("batch_size", lh.batch_size);
    };
    load_linear("logreg", hp.logreg);
    load_linear("svc", hp.svc);
    if (object.contains("knn")) {
        check_keys(object["knn"], {"k"}, "hyperparams.knn");
        hp.knn.k = object["knn"].value("k", hp.knn.k);
    }
    if (object.contains("tree")) {
        check_keys(object["tree"], {"max_depth", "min_samples_split"}, "hyperparams.tree");
        hp.tree.max_depth = object["tree"].value("max_depth", hp.tree.max_depth);
        hp.tree.min_samples_split =
            object["tree"].value("min_samples_split", hp.tree.min_samples_split);
    }
    if (object.contains("nb")) {
        check_keys(object["nb"], {"alpha"}, "hyperparams.nb");
        hp.nb.alpha = object["nb"].value("alpha", hp.nb.alpha);
    }
}

} // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json root = json::parse(in, nullptr, false);
    if (root.is_discarded() || !root.is_object())
        throw ValidationError("config file is not a JSON object: " + path);

    check_keys(root,
               {"paths", "barriers", "categories", "modes", "models", "seed", "split",
                "sentiment", "trend_tolerance", "inference_filter", "relations",
                "hyperparams"},
               "config");

    RunConfig config = default_config();
    const fs::path base = fs::path(path).parent_path();

    if (root.contains("paths")) {
        const json& p = root["paths"];
        check_keys(p,
                   {"articles", "publishers", "countries", "inferences", "lexicon",
                    "negators", "boosters", "stopwords", "alignment_synonyms", "out_dir"},
                   "paths");
        config.paths.articles = resolve(base, p.value("articles", ""));
        config.paths.publishers = resolve(base, p.value("publishers", ""));
        config.paths.countries = resolve(base, p.value("countries", ""));
        config.paths.inferences = resolve(base, p.value("inferences", ""));
        config.paths.lexicon = resolve(base, p.value("lexicon", ""));
        config.paths.negators = resolve(base, p.value("negators", ""));
        config.paths.boosters = resolve(base, p.value("boosters", ""));
        config.paths.stopwords = resolve(base, p.value("stopwords", ""));
        config.paths.alignment_synonyms = resolve(base, p.value("alignment_synonyms", ""));
        config.paths.out_dir = resolve(base, p.value("out_dir", "out"));
    }
    if (root.contains("barriers"))
        config.barriers = parse_list<BarrierKind>(root["barriers"], "barrier", parse_barrier);
    if (root.contains("categories"))
        config.categories =
            parse_list<Category>(root["categories"], "category", parse_category);
    if (root.contains("modes"))
        config.modes =
            parse_list<FeatureMode>(root["modes"], "feature mode", parse_feature_mode);
    if (root.contains("models"))
        config.models = parse_list<ModelKind>(root["models"], "model", parse_model_kind);
    config.seed = root.value("seed", config.seed);
    if (root.contains("split")) {
        check_keys(root["split"], {"train_fraction"}, "split");
        config.split.train_fraction =
            root["split"].value("train_fraction", config.split.train_fraction);
    }
    if (root.contains("sentiment")) {
        const json& s = root["sentiment"];
        check_keys(s,
                   {"alpha", "negation_factor", "context_window", "positive_threshold",
                    "negative_threshold"},
                   "sentiment");
        config.sentiment.alpha = s.value("alpha", config.sentiment.alpha);
        config.sentiment.negation_factor =
            s.value("negation_factor", config.sentiment.negation_factor);
        config.sentiment.context_window =
            s.value("context_window", config.sentiment.context_window);
        config.sentiment.positive_threshold =
            s.value("positive_threshold", config.sentiment.positive_threshold);
        config.sentiment.negative_threshold =
            s.value("negative_threshold", config.sentiment.negative_threshold);
    }
    config.trend_tolerance = root.value("trend_tolerance", config.trend_tolerance);
    if (root.contains("inference_filter")) {
        const std::string name = root["inference_filter"].get<std::string>();
        const auto parsed = parse_inference_filter(name);
        if (!parsed) throw ValidationError("unknown inference_filter \"" + name + "\"");
        config.inference_filter = *parsed;
    }
    if (root.contains("relations")) {
        check_keys(root["relations"], {"extra"}, "relations");
        if (root["relations"].contains("extra"))
            for (const auto& [relation, rendered] : root["relations"]["extra"].items())
                config.relations.add(relation, rendered.get<std::string>());
    }
    if (root.contains("hyperparams")) load_hyperparams(root["hyperparams"], config.hyperparams);

    config.hyperparams.seed = config.seed;
    config.split.seed = config.seed;
    return config;
}

void apply_overrides(RunConfig& config, const ConfigOverrides& overrides) {
    auto parse_csv = [](const std::string& csv) {
        std::vector<std::string> items;
        for (const std::string& item : split(csv, ','))
            if (!trim(item).empty()) items.push_back(trim(item));
        return items;
    };
    if (overrides.seed) {
        config.seed = *overrides.seed;
        config.hyperparams.seed = *overrides.seed;
        config.split.seed = *overrides.seed;
    }
    if (overrides.barriers) {
        config.barriers.clear();
        for (const std::string& name : parse_csv(*overrides.barriers)) {
            const auto parsed = parse_barrier(name);
            if (!parsed) throw ValidationError("unknown barrier \"" + name + "\"");
            config.barriers.push_back(*parsed);
        }
    }
    if (overrides.categories) {
        config.categories.clear();
        for (const std::string& name : parse_csv(*overrides.categories)) {
            const auto parsed = parse_category(name);
            if (!parsed) throw ValidationError("unknown category \"" + name + "\"");
            config.categories.push_back(*parsed);
        }
    }
    if (overrides.mode) {
        const auto parsed = parse_feature_mode(*overrides.mode);
        if (!parsed) throw ValidationError("unknown feature mode \"" + *overrides.mode + "\"");
        config.modes = {*parsed};
    }
    if (overrides.models) {
        config.models.clear();
        for (const std::string& name : parse_csv(*overrides.models)) {
            const auto parsed = parse_model_kind(name);
            if (!parsed) throw ValidationError("unknown model \"" + name + "\"");
            config.models.push_back(*parsed);
        }
    }
    if (overrides.out_dir) config.paths.out_dir = *overrides.out_dir;
}

namespace {

json config_to_json(const RunConfig& c) {
    json j;
    j["paths"] = {{"articles", c.paths.articles},
                  {"publishers", c.paths.publishers},
                  {"countries", c.paths.countries},
                  {"inferences", c.paths.inferences},
                  {"lexicon", c.paths.lexicon},
                  {"negators", c.paths.negators},
                  {"boosters", c.paths.boosters},
                  {"stopwords", c.paths.stopwords},
                  {"alignment_synonyms", c.paths.alignment_synonyms}};
    auto names = [](const auto& items, auto name_of) {
        std::vector<std::string> out;
        for (const auto& item : items) out.emplace_back(name_of(item));
        return out;
    };
    j["barriers"] = names(c.barriers, [](BarrierKind b) { return std::string(barrier_name(b)); });
    j["categories"] =
        names(c.categories, [](Category x) { return std::string(category_name(x)); });
    j["modes"] =
        names(c.modes, [](FeatureMode m) { return std::string(feature_mode_name(m)); });
    j["models"] =
        names(c.models, [](ModelKind m) { return std::string(model_kind_name(m)); });
    j["seed"] = c.seed;
    j["split"] = {{"train_fraction", c.split.train_fraction}};
    j["sentiment"] = {{"alpha", c.sentiment.alpha},
                      {"negation_factor", c.sentiment.negation_factor},
                      {"context_window", c.sentiment.context_window},
                      {"positive_threshold", c.sentiment.positive_threshold},
                      {"negative_threshold", c.sentiment.negative_threshold}};
    j["trend_tolerance"] = c.trend_tolerance;
    j["inference_filter"] = std::string(inference_filter_name(c.inference_filter));
    json relations = json::object();
    for (const auto& [relation, rendered] : c.relations.past_form) relations[relation] = rendered;
    j["relations"] = relations;
    const Hyperparams& hp = c.hyperparams;
    j["hyperparams"] = {
        {"mlp",
         {{"hidden_layers", hp.mlp.hidden_layers},
          {"hidden_units", hp.mlp.hidden_units},
          {"epochs", hp.mlp.epochs},
          {"batch_size", hp.mlp.batch_size},
          {"dropout", hp.mlp.dropout},
          {"learning_rate", hp.mlp.adam.learning_rate},
          {"beta1", hp.mlp.adam.beta1},
          {"beta2", hp.mlp.adam.beta2},
          {"epsilon", hp.mlp.adam.epsilon}}},
        {"logreg",
         {{"l2", hp.logreg.l2},
          {"epochs", hp.logreg.epochs},
          {"learning_rate", hp.logreg.learning_rate},
          {"batch_size", hp.logreg.batch_size}}},
        {"svc",
         {{"l2", hp.svc.l2},
          {"epochs", hp.svc.epochs},
          {"learning_rate", hp.svc.learning_rate},
          {"batch_size", hp.svc.batch_size}}},
        {"knn", {{"k", hp.knn.k}}},
        {"tree",
         {{"max_depth", hp.tree.max_depth},
          {"min_samples_split", hp.tree.min_samples_split}}},
        {"nb", {{"alpha", hp.nb.alpha}}}};
    return j;
}

char hex_digit(std::uint64_t v) { return "0123456789abcdef"[v & 0xF]; }

std::string to_hex(std::uint64_t v) {
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex_digit(v);
        v >>= 4;
    }
    return out;
}

} // namespace

std::string config_hash(const RunConfig& config) {
    return to_hex(fnv1a64(config_to_json(config).dump()));
}

void validate_config(const RunConfig& config) {
    struct Entry {
        const char* name;
        const std::string& path;
        bool required;
    };
    const bool needs_inferences = config.inference_filter != InferenceFilter::off;
    const Entry entries[] = {
        {"articles", config.paths.articles, true},
        {"publishers", config.paths.publishers, true},
        {"countries", config.paths.countries, true},
        {"inferences", config.paths.inferences, needs_inferences},
        {"lexicon", config.paths.lexicon, true},
        {"negators", config.paths.negators, true},
        {"boosters", config.paths.boosters, true},
        {"stopwords", config.paths.stopwords, true},
        {"alignment_synonyms", config.paths.alignment_synonyms, false},
    };
    for (const Entry& e : entries) {
        if (e.path.empty()) {
            if (e.required)
                throw ValidationError(std::string("config path \"") + e.name + "\" is not set");
            continue;
        }
        if (!fs::exists(e.path))
            throw ValidationError(std::string("config path \"") + e.name +
                                  "\" does not exist: " + e.path);
    }
    if (config.paths.out_dir.empty())
        throw ValidationError("config path \"out_dir\" is not set");
    fs::create_directories(config.paths.out_dir);
    const fs::path probe = fs::path(config.paths.out_dir) / ".write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw IoError("output directory is not writable: " + config.paths.out_dir);
    }
    fs::remove(probe);
    config.hyperparams.validate();
}

// ---- manifest and artifact plumbing -----------------------------------------

namespace {

fs::path out_path(const RunConfig& config, const std::string& relative) {
    return fs::path(config.paths.out_dir) / relative;
}

fs::path manifest_path(const RunConfig& config) { return out_path(config, "manifest.json"); }

json read_manifest(const RunConfig& config) {
    std::ifstream in(manifest_path(config));
    if (!in) return json::object();
    json m = json::parse(in, nullptr, false);
    if (m.is_discarded() || !m.is_object()) return json::object();
    return m;
}

void write_manifest(const RunConfig& config, const json& manifest) {
    std::ofstream out(manifest_path(config));
    if (!out) throw IoError("cannot write manifest: " + manifest_path(config).string());
    out << manifest.dump(2) << "\n";
}

json begin_stage(const RunConfig& config, const std::string& stage) {
    json manifest = read_manifest(config);
    const std::string hash = config_hash(config);
    if (manifest.contains("config_hash") && manifest["config_hash"] != hash)
        throw ValidationError("output directory " + config.paths.out_dir +
                              " holds artifacts from a different configuration; "
                              "use a fresh --out or matching config");
    manifest["config_hash"] = hash;
    manifest["seed"] = config.seed;
    if (!manifest.contains("stages")) manifest["stages"] = json::object();
    manifest["stages"][stage] = {{"complete", false}};
    write_manifest(config, manifest);
    return manifest;
}

void finish_stage(const RunConfig& config, const std::string& stage,
                  std::vector<std::string> artifacts,
                  const std::map<std::string, std::string>& skipped = {}) {
    json manifest = read_manifest(config);
    std::sort(artifacts.begin(), artifacts.end());
    json entry = {{"complete", true}, {"artifacts", artifacts}};
    if (!skipped.empty()) {
        json s = json::object();
        for (const auto& [key, reason] : skipped) s[key] = reason;
        entry["skipped"] = s;
    }
    manifest["stages"][stage] = entry;
    write_manifest(config, manifest);
}

void require_stage(const RunConfig& config, const std::string& stage) {
    const json manifest = read_manifest(config);
    if (!manifest.contains("stages") || !manifest["stages"].contains(stage) ||
        !manifest["stages"][stage].value("complete", false))
        throw ValidationError("stage \"" + stage + "\" has not completed in " +
                              config.paths.out_dir + "; run it first");
    if (manifest.value("config_hash", "") != config_hash(config))
        throw ValidationError("artifacts in " + config.paths.out_dir +
                              " carry a different config hash; rerun earlier stages");
}

std::string tsv_header(const RunConfig& config) {
    return "# config_hash=" + config_hash(config) + " seed=" + std::to_string(config.seed);
}

std::ofstream open_artifact(const RunConfig& config, const std::string& relative) {
    const fs::path path = out_path(config, relative);
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write artifact: " + path.string());
    out << tsv_header(config) << "\n";
    return out;
}

void check_artifact_header(const RunConfig& config, const std::string& relative) {
    std::ifstream in(out_path(config, relative));
    if (!in) throw IoError("missing artifact: " + out_path(config, relative).string());
    std::string first;
    std::getline(in, first);
    const std::string expected_tsv = tsv_header(config);
    if (first == expected_tsv) return;
    // JSONL artifacts carry the same information in a _meta record.
    json meta = json::parse(first, nullptr, false);
    if (!meta.is_discarded() && meta.is_object() && meta.contains("_meta") &&
        meta["_meta"].value("config_hash", "") == config_hash(config))
        return;
    throw ValidationError("artifact " + relative + " carries a different config hash");
}

void write_rejections(const RunConfig& config, const std::string& relative,
                      std::span<const Rejection> rejections) {
    std::ofstream out = open_artifact(config, relative);
    out << "# line\treason\n";
    for (const Rejection& r : rejections) out << r.line_no << '\t' << r.reason << '\n';
}

// ---- artifact readers --------------------------------------------------------

std::vector<NewsArticle> read_ingested_articles(const RunConfig& config) {
    check_artifact_header(config, "ingest/articles.jsonl");
    ArticleLoadResult loaded =
        load_articles(out_path(config, "ingest/articles.jsonl").string());
    if (!loaded.rejections.empty())
        throw ValidationError("ingest artifact is corrupt: line " +
                              std::to_string(loaded.rejections.front().line_no) + ": " +
                              loaded.rejections.front().reason);
    return std::move(loaded.articles);
}

std::vector<EventAnnotation> read_annotations(const RunConfig& config) {
    check_artifact_header(config, "annotate/annotations.tsv");
    std::map<std::string, EventAnnotation> by_event;
    std::size_t line_no = 0;
    for (const std::string& line :
         read_lines(out_path(config, "annotate/annotations.tsv").string())) {
        ++line_no;
        if (trim(line).empty() || line[0] == '#') continue;
        const auto cells = split(line, '\t');
        if (cells.size() < 3)
            throw ValidationError("annotations.tsv line " + std::to_string(line_no) +
                                  ": expected event_id, barrier, label");
        const auto barrier = parse_barrier(cells[1]);
        if (!barrier)
            throw ValidationError("annotations.tsv line " + std::to_string(line_no) +
                                  ": unknown barrier \"" + cells[1] + "\"");
        EventAnnotation& annotation = by_event[cells[0]];
        annotation.event_id = cells[0];
        if (is_ternary_barrier(*barrier)) {
            const auto label = parse_ternary_label(cells[2]);
            if (!label)
                throw ValidationError("annotations.tsv line " + std::to_string(line_no) +
                                      ": bad label \"" + cells[2] + "\"");
            (*barrier == BarrierKind::cultural ? annotation.cultural : annotation.economic) =
                *label;
        } else {
            const auto label = parse_binary_label(cells[2], *barrier);
            if (!label)
                throw ValidationError("annotations.tsv line " + std::to_string(line_no) +
                                      ": bad label \"" + cells[2] + "\"");
            if (*barrier == BarrierKind::political)
                annotation.political = *label;
            else if (*barrier == BarrierKind::linguistic)
                annotation.linguistic = *label;
            else
                annotation.geographical = *label;
        }
        if (cells.size() > 3) annotation.provenance[*barrier] = cells[3];
    }
    std::vector<EventAnnotation> annotations;
    annotations.reserve(by_event.size());
    for (auto& [event_id, annotation] : by_event) annotations.push_back(std::move(annotation));
    return annotations;
}

std::unordered_map<std::string, SentimentScore> read_scores(const RunConfig& config) {
    check_artifact_header(config, "sentiment/scores.tsv");
    std::unordered_map<std::string, SentimentScore> scores;
    for (const std::string& line :
         read_lines(out_path(config, "sentiment/scores.tsv").string())) {
        if (trim(line).empty() || line[0] == '#') continue;
        const auto cells = split(line, '\t');
        if (cells.size() < 3) continue;
        SentimentScore score;
        score.compound = std::stod(cells[1]);
        const auto polarity = parse_polarity(cells[2]);
        if (!polarity) throw ValidationError("scores.tsv: bad polarity \"" + cells[2] + "\"");
        score.polarity = *polarity;
        scores.emplace(cells[0], score);
    }
    return scores;
}

InferenceSet load_inference_set(const RunConfig& config, std::vector<Rejection>* rejections) {
    if (config.paths.inferences.empty()) return {};
    InferenceLoadResult loaded = load_inferences(config.paths.inferences, config.relations);
    if (rejections) *rejections = std::move(loaded.rejections);
    return std::move(loaded.set);
}

std::string task_key(BarrierKind barrier, Category category, FeatureMode mode) {
    return std::string(barrier_name(barrier)) + "." + std::string(category_name(category)) +
           "." + std::string(feature_mode_name(mode));
}

} // namespace

// ---- stages -------------------------------------------------------------------

void run_ingest(const RunConfig& config) {
    begin_stage(config, "ingest");

    ArticleLoadResult loaded = load_articles(config.paths.articles);
    std::vector<std::string> artifacts = {"ingest/articles.jsonl", "ingest/rejections.tsv"};

    std::vector<NewsArticle> articles = std::move(loaded.articles);
    std::vector<std::string> dropped_no_inference;
    if (config.inference_filter == InferenceFilter::global) {
        const InferenceSet inferences = load_inference_set(config, nullptr);
        std::vector<NewsArticle> kept;
        kept.reserve(articles.size());
        for (NewsArticle& article : articles) {
            if (inferences.has(article.article_id))
                kept.push_back(std::move(article));
            else
                dropped_no_inference.push_back(article.article_id);
        }
        articles = std::move(kept);
    }

    const std::vector<EventGroup> groups = group_by_event(std::move(articles));
    {
        const fs::path path = out_path(config, "ingest/articles.jsonl");
        fs::create_directories(path.parent_path());
        std::ofstream out(path);
        if (!out) throw IoError("cannot write artifact: " + path.string());
        json meta = {{"_meta",
                      {{"config_hash", config_hash(config)}, {"seed", config.seed}}}};
        out << meta.dump() << "\n";
        for (const EventGroup& group : groups)
            for (const NewsArticle& article : group.articles)
                out << article_to_json_line(article) << "\n";
    }
    write_rejections(config, "ingest/rejections.tsv", loaded.rejections);
    if (config.inference_filter == InferenceFilter::global) {
        std::ofstream out = open_artifact(config, "ingest/dropped_no_inference.tsv");
        out << "# article_id\n";
        std::sort(dropped_no_inference.begin(), dropped_no_inference.end());
        for (const std::string& id : dropped_no_inference) out << id << "\n";
        artifacts.push_back("ingest/dropped_no_inference.tsv");
    }
    finish_stage(config, "ingest", std::move(artifacts));
}

void run_annotate(const RunConfig& config) {
    require_stage(config, "ingest");
    begin_stage(config, "annotate");

    const std::vector<NewsArticle> articles = read_ingested_articles(config);
    const std::vector<EventGroup> groups = group_by_event(articles);

    RegistryLoadResult registry = load_registry(config.paths.publishers, config.paths.countries);
    write_rejections(config, "annotate/publisher_rejections.tsv",
                     registry.publisher_rejections);
    write_rejections(config, "annotate/country_rejections.tsv", registry.country_rejections);

    LabelerOptions options;
    if (!config.paths.alignment_synonyms.empty())
        options.alignment_synonyms = load_alignment_synonyms(config.paths.alignment_synonyms);

    {
        std::ofstream drops = open_artifact(config, "annotate/drops.tsv");
        drops << "# barrier\tevent_id\treason\n";
        std::ofstream removed = open_artifact(config, "annotate/removed_articles.tsv");
        removed << "# barrier\tarticle_id\treason\n";
        for (BarrierKind barrier : config.barriers) {
            const FilterResult filtered =
                filter_annotatable(groups, registry.registry, barrier);
            for (const DroppedEvent& d : filtered.dropped)
                drops << barrier_name(barrier) << '\t' << d.event_id << '\t' << d.reason
                      << '\n';
            for (const RemovedArticle& r : filtered.removed_articles)
                removed << barrier_name(barrier) << '\t' << r.article_id << '\t' << r.reason
                        << '\n';
        }
    }

    const AnnotateResult result = annotate_corpus(groups, registry.registry, options);
    {
        std::ofstream out = open_artifact(config, "annotate/annotations.tsv");
        out << "# event_id\tbarrier\tlabel\tprovenance\n";
        for (const EventAnnotation& annotation : result.annotations)
            for (BarrierKind barrier : config.barriers) {
                const auto label = annotation.label_name(barrier);
                if (!label) continue;
                const auto provenance = annotation.provenance.find(barrier);
                out << annotation.event_id << '\t' << barrier_name(barrier) << '\t' << *label
                    << '\t'
                    << (provenance == annotation.provenance.end() ? "" : provenance->second)
                    << '\n';
            }
    }
    {
        std::ofstream out = open_artifact(config, "annotate/failures.tsv");
        out << "# event_id\tmessage\n";
        for (const AnnotationFailure& f : result.failures)
            out << f.event_id << '\t' << f.message << '\n';
    }
    finish_stage(config, "annotate",
                 {"annotate/annotations.tsv", "annotate/drops.tsv",
                  "annotate/removed_articles.tsv", "annotate/failures.tsv",
                  "annotate/publisher_rejections.tsv", "annotate/country_rejections.tsv"});
}

void run_sentiment(const RunConfig& config) {
    require_stage(config, "ingest");
    require_stage(config, "annotate");
    begin_stage(config, "sentiment");

    const std::vector<NewsArticle> articles = read_ingested_articles(config);
    const ValenceLexicon lexicon =
        load_lexicon(config.paths.lexicon, config.paths.negators, config.paths.boosters);

    std::vector<std::string> titles;
    titles.reserve(articles.size());
    for (const NewsArticle& article : articles) titles.push_back(article.title);
    const std::vector<SentimentScore> scores = score_texts(titles, lexicon, config.sentiment);

    {
        std::ofstream out = open_artifact(config, "sentiment/scores.tsv");
        out << "# article_id\tcompound\tclass\n";
        for (std::size_t i = 0; i < articles.size(); ++i)
            out << articles[i].article_id << '\t' << format_fixed(scores[i].compound, 6)
                << '\t' << polarity_name(scores[i].polarity) << '\n';
    }

    const std::vector<EventAnnotation> annotations = read_annotations(config);
    std::map<std::string, const EventAnnotation*> by_event;
    for (const EventAnnotation& a : annotations) by_event.emplace(a.event_id, &a);

    const std::set<Category> wanted(config.categories.begin(), config.categories.end());
    std::map<GroupKey, std::vector<SentimentScore>> groups;
    for (std::size_t i = 0; i < articles.size(); ++i) {
        if (!wanted.count(articles[i].category)) continue;
        const auto annotation = by_event.find(articles[i].event_id);
        if (annotation == by_event.end()) continue;
        for (BarrierKind barrier : config.barriers) {
            const auto label = annotation->second->label_name(barrier);
            if (!label) continue;
            groups[{std::string(barrier_name(barrier)),
                    std::string(category_name(articles[i].category)), *label}]
                .push_back(scores[i]);
        }
    }

    {
        std::ofstream dist_out = open_artifact(config, "sentiment/distributions.tsv");
        dist_out << "# barrier\tcategory\tlabel\tn_pos\tn_neu\tn_neg\tpos_pct\tneu_pct\tneg_"
                    "pct\n";
        std::ofstream trend_out = open_artifact(config, "sentiment/trends.tsv");
        trend_out << "# barrier\tcategory\tlabel\ttrend\n";
        for (const auto& [key, group_scores] : groups) {
            const ClassSentimentDistribution dist = distribution(group_scores, key);
            dist_out << key.barrier << '\t' << key.category << '\t' << key.label << '\t'
                     << dist.n_positive << '\t' << dist.n_neutral << '\t' << dist.n_negative
                     << '\t' << format_fixed(dist.pos_pct, 2) << '\t'
                     << format_fixed(dist.neu_pct, 2) << '\t' << format_fixed(dist.neg_pct, 2)
                     << '\n';
            const TrendType trend =
                detect_trend(dist.pos_pct, dist.neu_pct, dist.neg_pct, config.trend_tolerance);
            trend_out << key.barrier << '\t' << key.category << '\t' << key.label << '\t'
                      << trend_name(trend) << '\n';
        }
    }
    {
        std::vector<double> compounds;
        compounds.reserve(scores.size());
        for (const SentimentScore& s : scores) compounds.push_back(s.compound);
        const auto bins = compound_histogram(compounds);
        std::ofstream out = open_artifact(config, "sentiment/histogram.tsv");
        out << "# bin_low\tbin_high\tcount\n";
        for (std::size_t b = 0; b < bins.size(); ++b) {
            const double low = -1.0 + 2.0 * static_cast<double>(b) / kHistogramBins;
            const double high = low + 2.0 / kHistogramBins;
            out << format_fixed(low, 2) << '\t' << format_fixed(high, 2) << '\t' << bins[b]
                << '\n';
        }
    }
    finish_stage(config, "sentiment",
                 {"sentiment/scores.tsv", "sentiment/distributions.tsv",
                  "sentiment/trends.tsv", "sentiment/histogram.tsv"});
}

void run_inferences(const RunConfig& config) {
    require_stage(config, "ingest");
    require_stage(config, "annotate");
    begin_stage(config, "inferences");

    const std::vector<NewsArticle> articles = read_ingested_articles(config);
    std::vector<Rejection> rejections;
    const InferenceSet inferences = load_inference_set(config, &rejections);
    write_rejections(config, "inferences/rejections.tsv", rejections);

    const RelationStats stats = relation_stats(inferences, articles, config.relations);
    {
        std::ofstream out = open_artifact(config, "inferences/relation_stats.tsv");
        out << "# category\trelation\tmean_per_headline\n";
        for (const auto& [category, row] : stats.means)
            for (const auto& [relation, mean] : row)
                out << category_name(category) << '\t' << relation << '\t'
                    << format_fixed(mean, 6) << '\n';
    }
    {
        std::ofstream out = open_artifact(config, "inferences/orphans.tsv");
        out << "# article_id\n";
        for (const std::string& id : stats.orphan_articles) out << id << '\n';
    }

    // Venn regions of distinct verbalized inferences per class, for each
    // configured (barrier, category).
    const std::vector<EventAnnotation> annotations = read_annotations(config);
    std::map<std::string, const EventAnnotation*> by_event;
    for (const EventAnnotation& a : annotations) by_event.emplace(a.event_id, &a);
    {
        std::ofstream out = open_artifact(config, "inferences/venn.tsv");
        out << "# barrier\tcategory\tregion\tcount\n";
        for (BarrierKind barrier : config.barriers)
            for (Category category : config.categories) {
                std::map<std::string, std::set<std::string>> sets;
                for (const NewsArticle& article : articles) {
                    if (article.category != category) continue;
                    const auto annotation = by_event.find(article.event_id);
                    if (annotation == by_event.end()) continue;
                    const auto label = annotation->second->label_name(barrier);
                    if (!label) continue;
                    auto& class_set = sets[*label];
                    for (const InferenceTriple& triple :
                         inferences.for_article(article.article_id))
                        class_set.insert(fold_key(verbalize(triple, config.relations)));
                }
                if (sets.size() < 2) continue;
               const VennRegions regions = class_intersections(sets);
                const std::string prefix = std::string(barrier_name(barrier)) + "\t" +
                                           std::string(category_name(category)) + "\t";
                for (std::size_t i = 0; i < regions.classes.size(); ++i)
                    out << prefix << "only:" << regions.classes[i] << '\t'
                        << regions.unique[i] << '\n';
                for (const auto& [pair, count] : regions.pairwise_only)
                    out << prefix << "only:" << regions.classes[pair.first] << '&'
                        << regions.classes[pair.second] << '\t' << count << '\n';
                if (regions.classes.size() == 3)
                    out << prefix << "all\t" << regions.common_all << '\n';
                out << prefix << "union\t" << regions.union_size << '\n';
            }
    }
    finish_stage(config, "inferences",
                 {"inferences/relation_stats.tsv", "inferences/orphans.tsv",
                  "inferences/rejections.tsv", "inferences/venn.tsv"});
}

void run_featurize(const RunConfig& config) {
    require_stage(config, "ingest");
    require_stage(config, "annotate");
    require_stage(config, "sentiment");
    begin_stage(config, "featurize");

    std::vector<NewsArticle> articles = read_ingested_articles(config);
    const std::vector<EventAnnotation> annotations = read_annotations(config);
    const InferenceSet inferences = load_inference_set(config, nullptr);
    const auto scores = read_scores(config);
    const TokenizerConfig tokenizer = load_stopwords(config.paths.stopwords);

    if (config.inference_filter == InferenceFilter::per_barrier) {
        std::vector<NewsArticle> kept;
        for (NewsArticle& article : articles)
            if (inferences.has(article.article_id)) kept.push_back(std::move(article));
        articles = std::move(kept);
    }

    std::unordered_map<std::string, Polarity> polarities;
    for (const auto& [id, score] : scores) polarities.emplace(id, score.polarity);

    std::vector<std::string> artifacts;
    std::map<std::string, std::string> skipped;
    for (BarrierKind barrier : config.barriers)
        for (Category category : config.categories)
            for (FeatureMode mode : config.modes) {
                const std::string key = task_key(barrier, category, mode);
                try {
                    const LabeledTexts texts =
                        build_texts(annotations, articles, inferences, polarities, barrier,
                                    category, mode, config.relations);
                    const SplitResult split = stratified_split(texts.labels, config.split);

                    auto subset = [&](const std::vector<std::size_t>& indices) {
                        LabeledTexts part;
                        part.class_names = texts.class_names;
                        for (std::size_t i : indices) {
                            part.article_ids.push_back(texts.article_ids[i]);
                            part.texts.push_back(texts.texts[i]);
                            part.labels.push_back(texts.labels[i]);
                        }
                        return part;
                    };
                    const LabeledTexts train_texts = subset(split.train);
                    const LabeledTexts test_texts = subset(split.test);

                    std::vector<std::vector<std::string>> train_docs;
                    for (const std::string& text : train_texts.texts)
                        train_docs.push_back(preprocess(text, tokenizer));
                    std::vector<std::vector<std::string>> test_docs;
                    for (const std::string& text : test_texts.texts)
                        test_docs.push_back(preprocess(text, tokenizer));

                    // No leakage: the vocabulary comes from the train split only.
                    const Vectorizer vectorizer = Vectorizer::fit(train_docs);
                    auto make_matrix = [&](const LabeledTexts& part,
                                           const std::vector<std::vector<std::string>>& docs) {
                        FeatureMatrix matrix;
                        matrix.rows = vectorizer.transform_many(docs);
                        matrix.labels = part.labels;
                        matrix.row_keys = part.article_ids;
                        matrix.class_names = part.class_names;
                        matrix.n_features = vectorizer.size();
                        return matrix;
                    };
                    const FeatureMatrix train_matrix = make_matrix(train_texts, train_docs);
                    const FeatureMatrix test_matrix = make_matrix(test_texts, test_docs);

                    const fs::path dir = out_path(config, "features");
                    fs::create_directories(dir);
                    const std::string header = tsv_header(config);
                    export_matrix(train_matrix, vectorizer,
                                  (dir / (key + ".train")).string(), header);
                    export_matrix(test_matrix, vectorizer, (dir / (key + ".test")).string(),
                                  header);
                    for (const char* suffix :
                         {".train.triplets.tsv", ".train.labels.tsv", ".train.vocab.tsv",
                          ".test.triplets.tsv", ".test.labels.tsv", ".test.vocab.tsv"})
                        artifacts.push_back("features/" + key + suffix);
                } catch (const ValidationError& e) {
                    skipped[key] = e.what();
                }
            }
    finish_stage(config, "featurize", std::move(artifacts), skipped);
}

void run_train(const RunConfig& config) {
    require_stage(config, "featurize");
    begin_stage(config, "train");

    std::vector<std::string> artifacts;
    std::map<std::string, std::string> skipped;
    for (BarrierKind barrier : config.barriers)
        for (Category category : config.categories)
            for (FeatureMode mode : config.modes) {
                const std::string key = task_key(barrier, category, mode);
                const std::string prefix =
                    out_path(config, "features/" + key).string();
                if (!fs::exists(prefix + ".train.triplets.tsv")) {
                    skipped[key] = "no featurized data";
                    continue;
                }
                check_artifact_header(config, "features/" + key + ".train.triplets.tsv");
                const FeatureMatrix train_matrix = import_matrix(prefix + ".train");
                for (ModelKind kind : config.models) {
                    const std::string model_key = key + "." +
                                                  std::string(model_kind_name(kind));
                    try {
                        TrainedModel model = train(kind, train_matrix, config.hyperparams);
                        model.meta.notes = tsv_header(config).substr(2);
                        const fs::path dir = out_path(config, "models");
                        fs::create_directories(dir);
                        save_model(model, (dir / (model_key + ".model")).string());
                        artifacts.push_back("models/" + model_key + ".model");
                    } catch (const ValidationError& e) {
                        skipped[model_key] = e.what();
                    }
                }
            }
    finish_stage(config, "train", std::move(artifacts), skipped);
}

void run_evaluate(const RunConfig& config) {
    require_stage(config, "featurize");
    require_stage(config, "train");
    begin_stage(config, "evaluate");

    std::vector<EvalReport> reports;
    std::map<std::string, std::string> skipped;
    for (BarrierKind barrier : config.barriers)
        for (Category category : config.categories)
            for (FeatureMode mode : config.modes) {
                const std::string key = task_key(barrier, category, mode);
                const std::string prefix = out_path(config, "features/" + key).string();
                if (!fs::exists(prefix + ".test.triplets.tsv")) {
                    skipped[key] = "no featurized data";
                    continue;
                }
                const FeatureMatrix test_matrix = import_matrix(prefix + ".test");
                for (ModelKind kind : config.models) {
                    const std::string model_key =
                        key + "." + std::string(model_kind_name(kind));
                    const fs::path model_path =
                        out_path(config, "models/" + model_key + ".model");
                    if (!fs::exists(model_path)) {
                        skipped[model_key] = "no trained model";
                        continue;
                    }
                    const TrainedModel model = load_model(model_path.string());
                    if (model.meta.notes != tsv_header(config).substr(2))
                        throw ValidationError("model " + model_key +
                                              " carries a different config hash");
                    const std::vector<std::size_t> predicted =
                        predict(model, test_matrix.rows);
                    EvalReport report =
                        f1_report(predicted, test_matrix.labels, test_matrix.class_names);
                    report.barrier = std::string(barrier_name(barrier));
                    report.category = std::string(category_name(category));
                    report.model = std::string(model_kind_name(kind));
                    report.mode = std::string(feature_mode_name(mode));
                    reports.push_back(std::move(report));
                }
            }

    {
        std::ofstream out = open_artifact(config, "eval/reports.tsv");
        out << "# barrier\tcategory\tmodel\tmode\tclass\tprecision\trecall\tf1\tsupport\n";
        for (const EvalReport& r : reports)
            for (std::size_t c = 0; c < r.class_names.size(); ++c)
                out << r.barrier << '\t' << r.category << '\t' << r.model << '\t' << r.mode
                    << '\t' << r.class_names[c] << '\t'
                    << format_fixed(r.per_class[c].precision, 6) << '\t'
                    << format_fixed(r.per_class[c].recall, 6) << '\t'
                    << format_fixed(r.per_class[c].f1, 6) << '\t' << r.per_class[c].support
                    << '\n';
    }
    {
        std::ofstream out = open_artifact(config, "eval/macro.tsv");
        out << "# barrier\tcategory\tmodel\tmode\tmacro_f1\ttest_size\n";
        for (const EvalReport& r : reports)
            out << r.barrier << '\t' << r.category << '\t' << r.model << '\t' << r.mode
                << '\t' << format_fixed(r.macro_f1, 6) << '\t' << r.test_size << '\n';
    }
    {
        std::ofstream out = open_artifact(config, "eval/confusion.tsv");
        out << "# barrier\tcategory\tmodel\tmode\tgold\tpredicted\tcount\n";
        for (const EvalReport& r : reports)
            for (std::size_t g = 0; g < r.class_names.size(); ++g)
                for (std::size_t p = 0; p < r.class_names.size(); ++p)
                    out << r.barrier << '\t' << r.category << '\t' << r.model << '\t'
                        << r.mode << '\t' << r.class_names[g] << '\t' << r.class_names[p]
                        << '\t' << r.confusion[g][p] << '\n';
    }
    std::vector<std::string> artifacts = {"eval/reports.tsv", "eval/macro.tsv",
                                          "eval/confusion.tsv", "eval/summaries.tsv"};
    {
        const std::vector<BarrierSummary> summaries = aggregate(reports);
        std::ofstream out = open_artifact(config, "eval/summaries.tsv");
        out << "# barrier\tmodel\tmode\tmean_macro_f1\tn_categories\n";
        for (const BarrierSummary& s : summaries) {
            out << s.barrier << '\t' << s.model << '\t' << s.mode << '\t'
                << format_fixed(s.mean_macro_f1, 6) << '\t' << s.per_category.size() << '\n';

            // one standalone table per summary, category rows plus the mean
            const std::string name =
                "eval/summary." + s.barrier + "." + s.model + "." + s.mode + ".tsv";
            std::ofstream table = open_artifact(config, name);
            table << "# category\tmacro_f1\n";
            for (const auto& [category, f1] : s.per_category)
                table << category << '\t' << format_fixed(f1, 6) << '\n';
            table << "mean\t" << format_fixed(s.mean_macro_f1, 6) << '\n';
            artifacts.push_back(name);
        }
    }
    finish_stage(config, "evaluate", std::move(artifacts), skipped);
}

void run_report(const RunConfig& config) {
    require_stage(config, "ingest");
    require_stage(config, "annotate");
    require_stage(config, "sentiment");
    require_stage(config, "inferences");
    require_stage(config, "evaluate");
    begin_stage(config, "report");

    const std::vector<NewsArticle> articles = read_ingested_articles(config);
    const std::vector<EventAnnotation> annotations = read_annotations(config);
    std::map<std::string, const EventAnnotation*> by_event;
    for (const EventAnnotation& a : annotations) by_event.emplace(a.event_id, &a);

    {
        const std::set<Category> wanted(config.categories.begin(), config.categories.end());
        std::map<std::tuple<std::string, std::string, std::string>, std::size_t> counts;
        for (const NewsArticle& article : articles) {
            if (!wanted.count(article.category)) continue;
            const auto annotation = by_event.find(article.event_id);
            if (annotation == by_event.end()) continue;
            for (BarrierKind barrier : config.barriers) {
                const auto label = annotation->second->label_name(barrier);
                if (!label) continue;
                ++counts[{std::string(barrier_name(barrier)),
                          std::string(category_name(article.category)), *label}];
            }
        }
        std::ofstream out = open_artifact(config, "report/label_distribution.tsv");
        out << "# barrier\tcategory\tlabel\tarticles\n";
        for (const auto& [key, count] : counts)
            out << std::get<0>(key) << '\t' << std::get<1>(key) << '\t' << std::get<2>(key)
                << '\t' << count << '\n';
    }

    const std::pair<const char*, const char*> copies[] = {
        {"sentiment/distributions.tsv", "report/sentiment_distribution.tsv"},
        {"sentiment/trends.tsv", "report/sentiment_trends.tsv"},
        {"sentiment/histogram.tsv", "report/sentiment_histogram.tsv"},
        {"inferences/relation_stats.tsv", "report/relation_stats.tsv"},
        {"inferences/venn.tsv", "report/venn.tsv"},
        {"eval/macro.tsv", "report/category_results.tsv"},
        {"eval/summaries.tsv", "report/barrier_summaries.tsv"},
    };
    std::vector<std::string> artifacts = {"report/label_distribution.tsv"};
    for (const auto& [source, target] : copies) {
        fs::create_directories(out_path(config, target).parent_path());
        fs::copy_file(out_path(config, source), out_path(config, target),
                      fs::copy_options::overwrite_existing);
        artifacts.emplace_back(target);
    }
    finish_stage(config, "report", std::move(artifacts));
}

void run_pipeline(const RunConfig& config) {
    run_ingest(config);
    run_annotate(config);
    run_sentiment(config);
    run_inferences(config);
    run_featurize(config);
    run_train(config);
    run_evaluate(config);
    run_report(config);
}

EvalReport run_external_score(const RunConfig& config, const std::string& predictions_path,
                              BarrierKind barrier, Category category, FeatureMode mode) {
    require_stage(config, "featurize");
    const std::string key = task_key(barrier, category, mode);
    const std::string prefix = out_path(config, "features/" + key).string();
    if (!fs::exists(prefix + ".test.triplets.tsv"))
        throw ValidationError("no featurized test split for " + key);
    const FeatureMatrix gold = import_matrix(prefix + ".test");
    EvalReport report = score_external(predictions_path, gold);
    report.barrier = std::string(barrier_name(barrier));
    report.category = std::string(category_name(category));
    report.model = "external";
    report.mode = std::string(feature_mode_name(mode));

    std::ofstream out = open_artifact(config, "eval/external." + key + ".tsv");
    out << "# class\tprecision\trecall\tf1\tsupport\n";
    for (std::size_t c = 0; c < report.class_names.size(); ++c)
        out << report.class_names[c] << '\t' << format_fixed(report.per_class[c].precision, 6)
            << '\t' << format_fixed(report.per_class[c].recall, 6) << '\t'
            << format_fixed(report.per_class[c].f1, 6) << '\t' << report.per_class[c].support
            << '\n';
    out << "macro_f1\t" << format_fixed(report.macro_f1, 6) << "\ttest_size\t"
        << report.test_size << '\n';
    return report;
}

} // namespace barriers
