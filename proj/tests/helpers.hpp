#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "barriers/corpus.hpp"
#include "barriers/profiles.hpp"
#include "barriers/rng.hpp"

namespace test_helpers {

using namespace barriers;

inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("barriers_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
    return path.string();
}

inline NewsArticle make_article(std::string id, std::string event, std::string domain,
                                Category category = Category::society,
                                std::string title = "a headline") {
    NewsArticle article;
    article.article_id = std::move(id);
    article.event_id = std::move(event);
    article.title = std::move(title);
    article.publisher_domain = std::move(domain);
    article.published_at = "2020-01-01T00:00:00Z";
    article.published_epoch = *parse_iso8601_utc(article.published_at);
    article.category = category;
    return article;
}

inline CountryProfile make_country(std::string name, Rng& rng, bool cultural = true,
                                   bool economic = true) {
    CountryProfile country;
    country.country = std::move(name);
    if (cultural) {
        std::array<double, kCulturalDims> v;
        for (double& x : v) x = rng.uniform(0.0, 100.0);
        country.cultural = v;
    }
    if (economic) {
        std::array<double, kEconomicDims> v;
        for (double& x : v) x = rng.uniform(0.0, 100.0);
        country.economic = v;
    }
    return country;
}

inline void recompute_bounds(ProfileRegistry& registry) {
    registry.bounds = DimensionBounds{};
    for (const auto& [key, country] : registry.countries) {
        if (country.cultural) {
            for (std::size_t d = 0; d < kCulturalDims; ++d) {
                auto& b = registry.bounds.cultural[d];
                const double v = (*country.cultural)[d];
                if (registry.bounds.cultural_count == 0)
                    b = {v, v};
                else {
                    b.min = std::min(b.min, v);
                    b.max = std::max(b.max, v);
                }
            }
            ++registry.bounds.cultural_count;
        }
        if (country.economic) {
            for (std::size_t d = 0; d < kEconomicDims; ++d) {
                auto& b = registry.bounds.economic[d];
                const double v = (*country.economic)[d];
                if (registry.bounds.economic_count == 0)
                    b = {v, v};
                else {
                    b.min = std::min(b.min, v);
                    b.max = std::max(b.max, v);
                }
            }
            ++registry.bounds.economic_count;
        }
    }
}

inline void add_publisher(ProfileRegistry& registry, std::string domain, std::string country,
                          std::string language = "English",
                          std::optional<std::string> alignment = std::string("neutral")) {
    PublisherProfile publisher;
    publisher.domain = fold_key(domain);
    publisher.country = std::move(country);
    publisher.publishing_language = std::move(language);
    publisher.political_alignment = std::move(alignment);
    registry.publishers.emplace(publisher.domain, std::move(publisher));
}

// Registry of n countries with complete vectors and one publisher per
// country, pub<i>.example -> country<i>.
inline ProfileRegistry synthetic_registry(std::size_t n_countries, Rng& rng) {
    ProfileRegistry registry;
    for (std::size_t i = 0; i < n_countries; ++i) {
        CountryProfile country = make_country("country" + std::to_string(i), rng);
        registry.countries.emplace(fold_key(country.country), country);
        add_publisher(registry, "pub" + std::to_string(i) + ".example", country.country);
    }
    recompute_bounds(registry);
    return registry;
}

} // namespace test_helpers
