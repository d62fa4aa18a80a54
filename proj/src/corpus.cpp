#include "barriers/corpus.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

namespace barriers {

using nlohmann::json;

const std::array<Category, kCategoryCount>& all_categories() {
    static const std::array<Category, kCategoryCount> all = {
        Category::business, Category::computers, Category::games, Category::health,
        Category::home,     Category::recreation, Category::science, Category::shopping,
        Category::society,  Category::sports,
    };
    return all;
}

std::string_view category_name(Category c) {
    switch (c) {
    case Category::business: return "business";
    case Category::computers: return "computers";
    case Category::games: return "games";
    case Category::health: return "health";
    case Category::home: return "home";
    case Category::recreation: return "recreation";
    case Category::science: return "science";
    case Category::shopping: return "shopping";
    case Category::society: return "society";
    case Category::sports: return "sports";
    }
    return "";
}

std::optional<Category> parse_category(std::string_view name) {
    for (Category c : all_categories())
        if (name == category_name(c)) return c;
    return std::nullopt;
}

namespace {

std::optional<std::string> get_string(const json& record, const char* field) {
    const auto it = record.find(field);
    if (it == record.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
}

// nullopt on success, otherwise the rejection reason.
std::optional<std::string> parse_article(const json& record, NewsArticle& out) {
    static const char* required[] = {"article_id", "event_id", "title",
                                     "publisher_domain", "published_at", "category"};
    for (const char* field : required) {
        const auto it = record.find(field);
        if (it == record.end()) return std::string("missing field '") + field + "'";
        if (!it->is_string()) return std::string("field '") + field + "' must be a string";
    }

    out.article_id = trim(*get_string(record, "article_id"));
    out.event_id = trim(*get_string(record, "event_id"));
    out.title = trim(*get_string(record, "title"));
    out.publisher_domain = fold_key(*get_string(record, "publisher_domain"));
    out.published_at = trim(*get_string(record, "published_at"));

    if (out.article_id.empty()) return "empty article_id";
    if (out.event_id.empty()) return "empty event_id";
    if (out.title.empty()) return "empty title";
    if (out.publisher_domain.empty()) return "empty publisher_domain";

    const auto epoch = parse_iso8601_utc(out.published_at);
    if (!epoch) return "published_at is not an ISO-8601 UTC timestamp";
    out.published_epoch = *epoch;

    const std::string category = *get_string(record, "category");
    const auto parsed = parse_category(trim(category));
    if (!parsed) return "unknown category \"" + category + "\"";
    out.category = *parsed;

    const auto body = record.find("body");
    if (body != record.end() && body->is_string()) out.body = body->get<std::string>();
    return std::nullopt;
}

} // namespace

ArticleLoadResult parse_articles(const std::vector<std::string>& lines) {
    ArticleLoadResult result;
    std::map<std::string, std::size_t> seen; // article_id -> line
    std::size_t line_no = 0;
    for (const std::string& line : lines) {
        ++line_no;
        if (trim(line).empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            result.rejections.push_back({line_no, "invalid JSON record"});
            continue;
        }
        if (record.size() == 1 && record.contains("_meta")) continue; // artifact header

        NewsArticle article;
        if (auto reason = parse_article(record, article)) {
            result.rejections.push_back({line_no, *reason});
            continue;
        }
        const auto [it, inserted] = seen.emplace(article.article_id, line_no);
        if (!inserted)
            throw ValidationError("duplicate article_id \"" + article.article_id +
                                  "\" at lines " + std::to_string(it->second) + " and " +
                                  std::to_string(line_no));
        result.articles.push_back(std::move(article));
    }
    return result;
}

ArticleLoadResult load_articles(const std::string& path) {
    return parse_articles(read_lines(path));
}

std::string article_to_json_line(const NewsArticle& article) {
    json record;
    record["article_id"] = article.article_id;
    record["event_id"] = article.event_id;
    record["title"] = article.title;
    if (article.body) record["body"] = *article.body;
    record["publisher_domain"] = article.publisher_domain;
    record["published_at"] = article.published_at;
    record["category"] = std::string(category_name(article.category));
    return record.dump();
}

std::vector<EventGroup> group_by_event(std::vector<NewsArticle> articles) {
    std::map<std::string, std::vector<NewsArticle>> by_event;
    for (auto& article : articles)
        by_event[article.event_id].push_back(std::move(article));

    std::vector<EventGroup> groups;
    groups.reserve(by_event.size());
    for (auto& [event_id, members] : by_event) {
        std::sort(members.begin(), members.end(),
                  [](const NewsArticle& a, const NewsArticle& b) {
                      if (a.published_epoch != b.published_epoch)
                          return a.published_epoch < b.published_epoch;
                      return a.article_id < b.article_id;
                  });
        groups.push_back({event_id, std::move(members)});
    }
    return groups;
}

std::optional<std::string> annotation_gap(const NewsArticle& article,
                                          const ProfileRegistry& registry,
                                          BarrierKind barrier) {
    const PublisherProfile* publisher = registry.find_publisher(article.publisher_domain);
    if (!publisher) return "publisher \"" + article.publisher_domain + "\" not in registry";

    switch (barrier) {
    case BarrierKind::geographical:
        if (publisher->country.empty()) return "missing country";
        return std::nullopt;
    case BarrierKind::linguistic:
        if (publisher->publishing_language.empty()) return "missing language";
        return std::nullopt;
    case BarrierKind::political:
        if (!publisher->political_alignment) return "missing alignment";
        return std::nullopt;
    case BarrierKind::cultural:
    case BarrierKind::economic: {
        if (publisher->country.empty()) return "missing country";
        const CountryProfile* country = registry.find_country(publisher->country);
        if (!country) return "country \"" + publisher->country + "\" not in registry";
        if (barrier == BarrierKind::cultural && !country->cultural)
            return "missing cultural profile for \"" + publisher->country + "\"";
        if (barrier == BarrierKind::economic && !country->economic)
            return "missing economic profile for \"" + publisher->country + "\"";
        return std::nullopt;
    }
    }
    return std::nullopt;
}

FilterResult filter_annotatable(const std::vector<EventGroup>& groups,
                                const ProfileRegistry& registry, BarrierKind barrier) {
    FilterResult result;
    for (const EventGroup& group : groups) {
        EventGroup kept{group.event_id, {}};
        std::set<std::string> reasons;
        for (const NewsArticle& article : group.articles) {
            if (auto gap = annotation_gap(article, registry, barrier)) {
                result.removed_articles.push_back({article.article_id, *gap});
                reasons.insert(*gap);
            } else {
                kept.articles.push_back(article);
            }
        }
        if (kept.articles.empty()) {
            std::string joined;
            for (const std::string& r : reasons) {
                if (!joined.empty()) joined += "; ";
                joined += r;
            }
            result.dropped.push_back({group.event_id, joined});
        } else {
            result.kept.push_back(std::move(kept));
        }
    }
    return result;
}

} // namespace barriers
