#include "barriers/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

namespace barriers {

TokenizerConfig load_stopwords(const std::string& path) {
    TokenizerConfig config;
    for (const std::string& line : read_lines(path)) {
        const std::string token = fold_key(line);
        if (token.empty() || token[0] == '#') continue;
        config.stopwords.insert(token);
    }
    return config;
}

std::vector<std::string> preprocess(std::string_view text, const TokenizerConfig& config) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (starts_with(text.substr(i), kSentimentTokenPrefix)) {
            std::size_t end = i;
            while (end < n && (std::isalnum(static_cast<unsigned char>(text[end])) ||
                               text[end] == '_'))
                ++end;
            tokens.emplace_back(text.substr(i, end - i));
            i = end;
            continue;
        }
        const auto uc = static_cast<unsigned char>(text[i]);
        if (!std::isalnum(uc)) {
            ++i;
            continue;
        }
        std::size_t end = i;
        std::string token;
        while (end < n && std::isalnum(static_cast<unsigned char>(text[end]))) {
            const auto c = static_cast<unsigned char>(text[end]);
            token += config.case_fold ? static_cast<char>(std::tolower(c))
                                      : static_cast<char>(c);
            ++end;
        }
        if (!config.stopwords.count(token)) tokens.push_back(std::move(token));
        i = end;
    }
    return tokens;
}

double dot(const SparseVector& a, const SparseVector& b) {
    double sum = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].index < b[j].index) {
            ++i;
        } else if (a[i].index > b[j].index) {
            ++j;
        } else {
            sum += a[i].value * b[j].value;
            ++i;
            ++j;
        }
    }
    return sum;
}

double l2_norm(const SparseVector& v) {
    double sum = 0.0;
    for (const SparseEntry& e : v) sum += e.value * e.value;
    return std::sqrt(sum);
}

Vectorizer Vectorizer::fit(std::span<const std::vector<std::string>> documents) {
    if (documents.empty())
        throw ValidationError("cannot fit a vectorizer on an empty corpus");

    Vectorizer v;
    std::map<std::string, std::size_t> df; // sorted -> stable column order
    for (const auto& doc : documents) {
        std::set<std::string> distinct(doc.begin(), doc.end());
        for (const std::string& token : distinct) ++df[token];
    }
    v.vocab_.reserve(df.size());
    v.df_.reserve(df.size());
    for (const auto& [token, count] : df) {
        v.index_.emplace(token, v.vocab_.size());
        v.vocab_.push_back(token);
        v.df_.push_back(count);
    }
    v.corpus_size_ = documents.size();
    v.fitted_ = true;
    return v;
}

double Vectorizer::idf(std::size_t column) const {
    return std::log((1.0 + static_cast<double>(corpus_size_)) /
                    (1.0 + static_cast<double>(df_[column]))) +
           1.0;
}

SparseVector Vectorizer::transform(std::span<const std::string> document) const {
    if (!fitted_) throw ContractViolation("transform called on an unfitted vectorizer");

    std::vector<std::size_t> columns;
    columns.reserve(document.size());
    for (const std::string& token : document) {
        const auto it = index_.find(token);
        if (it != index_.end()) columns.push_back(it->second);
    }
    std::sort(columns.begin(), columns.end());

    SparseVector row;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < columns.size();) {
        std::size_t j = i;
        while (j < columns.size() && columns[j] == columns[i]) ++j;
        const double weight = static_cast<double>(j - i) * idf(columns[i]);
        row.push_back({columns[i], weight});
        sum_sq += weight * weight;
        i = j;
    }
    if (sum_sq > 0.0) {
        const double norm = std::sqrt(sum_sq);
        for (SparseEntry& e : row) e.value /= norm;
    }
    return row;
}

namespace {

std::vector<SparseVector> run_transform(const Vectorizer& v,
                                        std::span<const std::vector<std::string>> documents,
                                        bool parallel) {
    std::vector<SparseVector> rows(documents.size());
    const std::int64_t n = static_cast<std::int64_t>(documents.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < n; ++i)
        rows[i] = v.transform(documents[i]);
    return rows;
}

} // namespace

std::vector<SparseVector> Vectorizer::transform_many(
    std::span<const std::vector<std::string>> documents) const {
    return run_transform(*this, documents, true);
}

std::vector<SparseVector> Vectorizer::transform_many_serial(
    std::span<const std::vector<std::string>> documents) const {
    return run_transform(*this, documents, false);
}

std::string_view feature_mode_name(FeatureMode mode) {
    return mode == FeatureMode::plain ? "plain" : "augmented";
}

std::optional<FeatureMode> parse_feature_mode(std::string_view name) {
    if (name == "plain") return FeatureMode::plain;
    if (name == "augmented") return FeatureMode::augmented;
    return std::nullopt;
}

LabeledTexts build_texts(std::span<const EventAnnotation> annotations,
                         std::span<const NewsArticle> articles,
                         const InferenceSet& inferences,
                         const std::unordered_map<std::string, Polarity>& sentiments,
                         BarrierKind barrier, Category category, FeatureMode mode,
                         const RelationTable& relations) {
    std::map<std::string, const EventAnnotation*> by_event;
    for (const EventAnnotation& annotation : annotations)
        by_event.emplace(annotation.event_id, &annotation);

    // Canonical class order, compressed below to the classes actually present.
    std::vector<std::string> canonical;
    if (is_ternary_barrier(barrier)) {
        canonical = {std::string(ternary_label_name(TernaryLabel::information_not_crossing)),
                     std::string(ternary_label_name(TernaryLabel::unsure)),
                     std::string(ternary_label_name(TernaryLabel::information_crossing))};
    } else {
        canonical = {binary_label_name(BinaryLabel::not_crossed, barrier),
                     binary_label_name(BinaryLabel::crossed, barrier)};
    }

    struct Selected {
        const NewsArticle* article;
        std::size_t canonical_label;
    };
    std::vector<Selected> selected;
    for (const NewsArticle& article : articles) {
        if (article.category != category) continue;
        const auto it = by_event.find(article.event_id);
        if (it == by_event.end()) continue;
        const auto label = it->second->label_id(barrier);
        if (!label) continue;
        selected.push_back({&article, *label});
    }
    if (selected.empty())
        throw ValidationError(std::string("no labeled articles for barrier ") +
                              std::string(barrier_name(barrier)) + ", category " +
                              std::string(category_name(category)));

    std::set<std::size_t> present;
    for (const Selected& s : selected) present.insert(s.canonical_label);
    std::vector<std::size_t> dense_of(canonical.size(), 0);
    LabeledTexts out;
    for (std::size_t id : present) {
        dense_of[id] = out.class_names.size();
        out.class_names.push_back(canonical[id]);
    }

    for (const Selected& s : selected) {
        const NewsArticle& article = *s.article;
        out.article_ids.push_back(article.article_id);
        out.labels.push_back(dense_of[s.canonical_label]);
        if (mode == FeatureMode::plain) {
            out.texts.push_back(article.title);
        } else {
            const auto sentiment = sentiments.find(article.article_id);
            const Polarity polarity =
                sentiment == sentiments.end() ? Polarity::neutral : sentiment->second;
            out.texts.push_back(augment_text(article.title,
                                             inferences.for_article(article.article_id),
                                             polarity, relations));
        }
    }
    return out;
}

BuiltDataset build_dataset(const LabeledTexts& texts, const TokenizerConfig& tokenizer) {
    std::vector<std::vector<std::string>> documents;
    documents.reserve(texts.texts.size());
    for (const std::string& text : texts.texts) documents.push_back(preprocess(text, tokenizer));

    BuiltDataset out;
    out.vectorizer = Vectorizer::fit(documents);
    out.matrix.rows = out.vectorizer.transform_many(documents);
    out.matrix.labels = texts.labels;
    out.matrix.row_keys = texts.article_ids;
    out.matrix.class_names = texts.class_names;
    out.matrix.n_features = out.vectorizer.size();
    return out;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path);
    return out;
}

} // namespace

void export_matrix(const FeatureMatrix& matrix, const Vectorizer& vectorizer,
                   const std::string& prefix, const std::string& meta_header) {
    {
        std::ofstream out = open_out(prefix + ".triplets.tsv");
        if (!meta_header.empty()) out << meta_header << "\n";
        out << "# rows=" << matrix.rows.size() << " cols=" << matrix.n_features << "\n";
        out << "# row\tcol\tweight\n";
        for (std::size_t r = 0; r < matrix.rows.size(); ++r)
            for (const SparseEntry& e : matrix.rows[r])
                out << r << '\t' << e.index << '\t' << format_double(e.value) << '\n';
    }
    {
        std::ofstream out = open_out(prefix + ".labels.tsv");
        if (!meta_header.empty()) out << meta_header << "\n";
        // The full class table rides along: a split may lack some class
        // entirely, yet its ids must still resolve.
        out << "# classes";
        for (const std::string& name : matrix.class_names) out << '\t' << name;
        out << "\n# row\tarticle_id\tlabel_id\tlabel_name\n";
        for (std::size_t r = 0; r < matrix.rows.size(); ++r)
            out << r << '\t' << matrix.row_keys[r] << '\t' << matrix.labels[r] << '\t'
                << matrix.class_names[matrix.labels[r]] << '\n';
    }
    {
        std::ofstream out = open_out(prefix + ".vocab.tsv");
        if (!meta_header.empty()) out << meta_header << "\n";
        out << "# col\ttoken\tdf\n";
        for (std::size_t c = 0; c < vectorizer.size(); ++c)
            out << c << '\t' << vectorizer.vocabulary()[c] << '\t'
                << vectorizer.document_frequency()[c] << '\n';
    }
}

FeatureMatrix import_matrix(const std::string& prefix) {
    FeatureMatrix matrix;
    std::map<std::size_t, std::string> names;

    std::size_t line_no = 0;
    for (const std::string& line : read_lines(prefix + ".labels.tsv")) {
        ++line_no;
        if (starts_with(line, "# classes")) {
            const auto cells = split(line, '\t');
            matrix.class_names.assign(cells.begin() + 1, cells.end());
            continue;
        }
        if (trim(line).empty() || line[0] == '#') continue;
        const auto cells = split(line, '\t');
        if (cells.size() < 4)
            throw ValidationError(prefix + ".labels.tsv line " + std::to_string(line_no) +
                                  ": expected 4 fields");
        matrix.row_keys.push_back(trim(cells[1]));
        matrix.labels.push_back(static_cast<std::size_t>(std::stoull(cells[2])));
        names.emplace(matrix.labels.back(), trim(cells[3]));
    }
    if (matrix.class_names.empty() && !names.empty()) {
        matrix.class_names.resize(names.rbegin()->first + 1);
        for (const auto& [id, name] : names) matrix.class_names[id] = name;
    }
    matrix.rows.resize(matrix.row_keys.size());

    for (const std::string& line : read_lines(prefix + ".triplets.tsv")) {
        if (starts_with(line, "# rows=")) {
            const auto fields = split(trim(line.substr(1)), ' ');
            for (const std::string& field : fields) {
                const auto kv = split(field, '=');
                if (kv.size() == 2 && kv[0] == "cols")
                    matrix.n_features = static_cast<std::size_t>(std::stoull(kv[1]));
            }
            continue;
        }
        if (trim(line).empty() || line[0] == '#') continue;
        const auto cells = split(line, '\t');
        if (cells.size() < 3) continue;
        const auto row = static_cast<std::size_t>(std::stoull(cells[0]));
        const auto col = static_cast<std::size_t>(std::stoull(cells[1]));
        if (row >= matrix.rows.size())
            throw ValidationError(prefix + ".triplets.tsv: row " + std::to_string(row) +
                                  " out of range");
        matrix.rows[row].push_back({col, std::stod(cells[2])});
        matrix.n_features = std::max(matrix.n_features, col + 1);
    }
    for (SparseVector& row : matrix.rows)
        std::sort(row.begin(), row.end(),
                  [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
    return matrix;
}

} // namespace barriers
