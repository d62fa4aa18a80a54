#include "barriers/inference.hpp"

#include <algorithm>

namespace barriers {

RelationTable RelationTable::defaults() {
    RelationTable table;
    table.past_form = {
        {"intent", "intended"},   {"intend", "intended"}, {"need", "needed"},
        {"want", "wanted"},       {"react", "reacted"},   {"desire", "desired"},
        {"causes", "caused"},     {"consists", "consisted of"},
        {"capableOf", "capableOf"}, {"isFilledBy", "isFilledBy"},
        {"hasSubEvent", "hasSubEvent"},
    };
    return table;
}

bool RelationTable::contains(std::string_view relation) const {
    return past_form.count(std::string(relation)) > 0;
}

void RelationTable::add(std::string relation, std::string rendered) {
    past_form[std::move(relation)] = std::move(rendered);
}

bool InferenceSet::has(std::string_view article_id) const {
    return by_article.count(std::string(article_id)) > 0;
}

std::span<const InferenceTriple> InferenceSet::for_article(std::string_view article_id) const {
    const auto it = by_article.find(std::string(article_id));
    if (it == by_article.end()) return {};
    return it->second;
}

InferenceLoadResult load_inferences(const std::string& path, const RelationTable& table) {
    InferenceLoadResult result;
    std::size_t line_no = 0;
    for (const std::string& line : read_lines(path)) {
        ++line_no;
        if (trim(line).empty() || line[0] == '#') continue;
        const auto cells = split(line, '\t');
        if (cells.size() < 3) {
            result.rejections.push_back(
                {line_no, "expected article_id <TAB> relation <TAB> tail"});
            continue;
        }
        InferenceTriple triple;
        triple.article_id = trim(cells[0]);
        triple.relation = trim(cells[1]);
        triple.tail = trim(cells[2]);
        if (triple.article_id.empty()) {
            result.rejections.push_back({line_no, "empty article_id"});
            continue;
        }
        if (!table.contains(triple.relation)) {
            result.rejections.push_back(
                {line_no, "unknown relation \"" + triple.relation + "\""});
            continue;
        }
        if (triple.tail.empty()) {
            result.rejections.push_back({line_no, "empty tail"});
            continue;
        }
        result.set.by_article[triple.article_id].push_back(std::move(triple));
    }
    return result;
}

std::string verbalize(const InferenceTriple& triple, const RelationTable& table) {
    const auto it = table.past_form.find(triple.relation);
    const std::string& rendered = it != table.past_form.end() ? it->second : triple.relation;
    return rendered + " " + triple.tail;
}

std::string augment_text(std::string_view headline, std::span<const InferenceTriple> triples,
                         Polarity sentiment, const RelationTable& table,
                         const AugmentOptions& options) {
    std::string text(headline);
    for (const InferenceTriple& triple : triples) {
        text += ". ";
        text += verbalize(triple, table);
    }
    if (options.include_sentiment) {
        text += ' ';
        text += kSentimentTokenPrefix;
        text += polarity_name(sentiment);
    }
    return text;
}

RelationStats relation_stats(const InferenceSet& inferences,
                             std::span<const NewsArticle> articles,
                             const RelationTable& table) {
    RelationStats stats;

    std::map<std::string, Category> category_of;
    for (const NewsArticle& article : articles) {
        ++stats.headline_counts[article.category];
        category_of.emplace(article.article_id, article.category);
    }

    std::map<Category, std::map<std::string, std::size_t>> totals;
    for (const auto& [article_id, triples] : inferences.by_article) {
        const auto at = category_of.find(article_id);
        if (at == category_of.end()) {
            stats.orphan_articles.push_back(article_id);
            continue;
        }
        for (const InferenceTriple& triple : triples) ++totals[at->second][triple.relation];
    }

    for (const auto& [category, count] : stats.headline_counts) {
        auto& row = stats.means[category];
        for (const auto& [relation, rendered] : table.past_form) {
            const auto& category_totals = totals[category];
            const auto it = category_totals.find(relation);
            const double total = it == category_totals.end()
                                     ? 0.0
                                     : static_cast<double>(it->second);
            row[relation] = total / static_cast<double>(count);
        }
    }
    return stats;
}

VennRegions class_intersections(const std::map<std::string, std::set<std::string>>& sets) {
    if (sets.size() < 2 || sets.size() > 3)
        throw ValidationError("class_intersections requires 2 or 3 class sets, got " +
                              std::to_string(sets.size()));

    VennRegions regions;
    std::vector<std::set<std::string>> folded;
    for (const auto& [name, elements] : sets) {
        regions.classes.push_back(name);
        std::set<std::string> f;
        for (const std::string& e : elements) f.insert(fold_key(e));
        folded.push_back(std::move(f));
    }
    regions.unique.assign(folded.size(), 0);

    std::set<std::string> all;
    for (const auto& s : folded) all.insert(s.begin(), s.end());
    regions.union_size = all.size();

    for (const std::string& element : all) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < folded.size(); ++i)
            if (folded[i].count(element)) members.push_back(i);
        if (members.size() == 1) {
            ++regions.unique[members[0]];
        } else if (members.size() == 2) {
            ++regions.pairwise_only[{members[0], members[1]}];
        } else {
            ++regions.common_all;
        }
    }
    // Keep every pairwise region present even when empty.
    for (std::size_t i = 0; i < folded.size(); ++i)
        for (std::size_t j = i + 1; j < folded.size(); ++j)
            regions.pairwise_only.try_emplace({i, j}, 0);
    return regions;
}

} // namespace barriers
