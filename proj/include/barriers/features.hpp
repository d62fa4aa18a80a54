#pragma once

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "barriers/common.hpp"
#include "barriers/corpus.hpp"
#include "barriers/inference.hpp"
#include "barriers/labeler.hpp"
#include "barriers/sentiment.hpp"

namespace barriers {

struct TokenizerConfig {
    std::unordered_set<std::string> stopwords; // matched after case-folding
    bool case_fold = true;
};

TokenizerConfig load_stopwords(const std::string& path);

// Case-folded alphanumeric runs with stopwords removed. Reserved sentiment
// tokens (SENTTOKEN_*) pass through verbatim.
std::vector<std::string> preprocess(std::string_view text, const TokenizerConfig& config);

struct SparseEntry {
    std::size_t index;
    double value;
};

using SparseVector = std::vector<SparseEntry>; // sorted by index

double dot(const SparseVector& a, const SparseVector& b);
double l2_norm(const SparseVector& v);

class Vectorizer {
public:
    Vectorizer() = default;

    // Vocabulary is every distinct token, sorted lexicographically, so column
    // order is stable across runs.
    static Vectorizer fit(std::span<const std::vector<std::string>> documents);

    // tf * (ln((1+N)/(1+df)) + 1), L2-normalized; unseen tokens are ignored.
    SparseVector transform(std::span<const std::string> document) const;

    std::vector<SparseVector> transform_many(
        std::span<const std::vector<std::string>> documents) const; // OpenMP
    std::vector<SparseVector> transform_many_serial(
        std::span<const std::vector<std::string>> documents) const;

    bool fitted() const { return fitted_; }
    std::size_t size() const { return vocab_.size(); }
    std::size_t corpus_size() const { return corpus_size_; }
    const std::vector<std::string>& vocabulary() const { return vocab_; }
    const std::vector<std::size_t>& document_frequency() const { return df_; }
    double idf(std::size_t column) const;

private:
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::size_t> df_;
    std::size_t corpus_size_ = 0;
    bool fitted_ = false;
};

struct FeatureMatrix {
    std::vector<SparseVector> rows;
    std::vector<std::size_t> labels;     // dense ids 0..C-1
    std::vector<std::string> row_keys;   // article ids
    std::vector<std::string> class_names;
    std::size_t n_features = 0;
};

enum class FeatureMode { plain, augmented };

std::string_view feature_mode_name(FeatureMode mode);
std::optional<FeatureMode> parse_feature_mode(std::string_view name);

// The selected rows for one (barrier, category) task: raw text plus labels.
// Splitting and vectorizing happen downstream so the vectorizer can be fit on
// the training partition only.
struct LabeledTexts {
    std::vector<std::string> article_ids;
    std::vector<std::string> texts;
    std::vector<std::size_t> labels;
    std::vector<std::string> class_names;
};

LabeledTexts build_texts(std::span<const EventAnnotation> annotations,
                         std::span<const NewsArticle> articles,
                         const InferenceSet& inferences,
                         const std::unordered_map<std::string, Polarity>& sentiments,
                         BarrierKind barrier, Category category, FeatureMode mode,
                         const RelationTable& relations);

struct BuiltDataset {
    FeatureMatrix matrix;
    Vectorizer vectorizer;
};

// Fits on all selected rows and transforms them. Used for standalone exports;
// evaluation re-fits on its training split.
BuiltDataset build_dataset(const LabeledTexts& texts, const TokenizerConfig& tokenizer);

// Sparse triplet export: <prefix>.triplets.tsv (row, col, weight),
// <prefix>.labels.tsv (row, article_id, label_id, label_name) and
// <prefix>.vocab.tsv (col, token, df). This is the surface for scoring
// externally trained models.
void export_matrix(const FeatureMatrix& matrix, const Vectorizer& vectorizer,
                   const std::string& prefix, const std::string& meta_header);

// Rebuilds the gold side of an exported matrix (labels + class table + keys).
FeatureMatrix import_matrix(const std::string& prefix);

} // namespace barriers
