#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "barriers/common.hpp"
#include "barriers/labels.hpp"
#include "barriers/profiles.hpp"

namespace barriers {

enum class Category {
    business, computers, games, health, home,
    recreation, science, shopping, society, sports,
};

inline constexpr std::size_t kCategoryCount = 10;

const std::array<Category, kCategoryCount>& all_categories();
std::string_view category_name(Category c);
std::optional<Category> parse_category(std::string_view name);

struct NewsArticle {
    std::string article_id;
    std::string event_id;
    std::string title;
    std::optional<std::string> body;
    std::string publisher_domain;
    std::string published_at; // ISO-8601 UTC as given
    std::int64_t published_epoch = 0;
    Category category = Category::business;
};

// Articles sharing an event id, ordered by (published_at, article_id).
struct EventGroup {
    std::string event_id;
    std::vector<NewsArticle> articles;
};

struct ArticleLoadResult {
    std::vector<NewsArticle> articles;
    std::vector<Rejection> rejections;
};

// Line-delimited JSON records with fields article_id, event_id, title, body?,
// publisher_domain, published_at, category. Unknown fields are ignored;
// malformed lines go to the rejection report. Duplicate article ids are fatal.
ArticleLoadResult load_articles(const std::string& path);
ArticleLoadResult parse_articles(const std::vector<std::string>& lines);

// Serialize one article back to its line format.
std::string article_to_json_line(const NewsArticle& article);

// Partition into per-event groups sorted by event_id; within a group the
// order is (published_at, article_id) ascending.
std::vector<EventGroup> group_by_event(std::vector<NewsArticle> articles);

struct DroppedEvent {
    std::string event_id;
    std::string reason;
};

struct RemovedArticle {
    std::string article_id;
    std::string reason;
};

struct FilterResult {
    std::vector<EventGroup> kept;
    std::vector<DroppedEvent> dropped;          // groups that lost every article
    std::vector<RemovedArticle> removed_articles; // articles cut from kept or dropped groups
};

// Why an article cannot be annotated for a barrier, or nullopt if it can.
std::optional<std::string> annotation_gap(const NewsArticle& article,
                                          const ProfileRegistry& registry,
                                          BarrierKind barrier);

// Keeps only articles whose publisher metadata supports the barrier; groups
// reduced to zero articles are dropped with a reason.
FilterResult filter_annotatable(const std::vector<EventGroup>& groups,
                                const ProfileRegistry& registry, BarrierKind barrier);

} // namespace barriers
