#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "barriers/common.hpp"
#include "barriers/corpus.hpp"
#include "barriers/sentiment.hpp"

namespace barriers {

// The accepted relation names and their past-form verbalization templates.
// Config may extend the set; relations outside it are rejected at load.
struct RelationTable {
    std::map<std::string, std::string> past_form; // relation -> rendered verb

    static RelationTable defaults();
    bool contains(std::string_view relation) const;
    void add(std::string relation, std::string rendered);
};

struct InferenceTriple {
    std::string article_id;
    std::string relation;
    std::string tail;
};

// Triples grouped by article, in input order.
struct InferenceSet {
    std::map<std::string, std::vector<InferenceTriple>> by_article;

    bool has(std::string_view article_id) const;
    std::span<const InferenceTriple> for_article(std::string_view article_id) const;
};

struct InferenceLoadResult {
    InferenceSet set;
    std::vector<Rejection> rejections;
};

// File format: article_id <TAB> relation <TAB> tail, one triple per line.
InferenceLoadResult load_inferences(const std::string& path, const RelationTable& table);

// "react angry" becomes "reacted angry"; relations without a past form render
// verbatim, e.g. "isFilledBy uproar at the republican convention".
std::string verbalize(const InferenceTriple& triple, const RelationTable& table);

struct AugmentOptions {
    bool include_sentiment = true;
};

inline constexpr std::string_view kSentimentTokenPrefix = "SENTTOKEN_";

// headline + ". " + verbalized phrases joined by ". ", then the reserved
// sentiment token. With no triples and sentiment disabled this is the
// identity on headlines.
std::string augment_text(std::string_view headline, std::span<const InferenceTriple> triples,
                         Polarity sentiment, const RelationTable& table,
                         const AugmentOptions& options = {});

struct RelationStats {
    // category -> relation -> mean triples per headline (zero-triple headlines
    // count in the denominator). Categories with no headlines are omitted.
    std::map<Category, std::map<std::string, double>> means;
    std::map<Category, std::size_t> headline_counts;
    std::vector<std::string> orphan_articles; // triples whose article is unknown
};

RelationStats relation_stats(const InferenceSet& inferences,
                             std::span<const NewsArticle> articles,
                             const RelationTable& table);

// Venn decomposition of 2 or 3 class sets: every element lands in exactly one
// region. Elements are compared after case-fold and trim.
struct VennRegions {
    std::vector<std::string> classes;
    std::vector<std::size_t> unique;                              // per class
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> pairwise_only;
    std::size_t common_all = 0;
    std::size_t union_size = 0;
};

VennRegions class_intersections(const std::map<std::string, std::set<std::string>>& sets);

} // namespace barriers
