#include <doctest.h>

#include <algorithm>

#include "barriers/corpus.hpp"
#include "helpers.hpp"

using namespace barriers;
using namespace test_helpers;

TEST_SUITE_BEGIN("corpus");

namespace {

std::string article_line(const std::string& id, const std::string& event,
                         const std::string& category = "society",
                         const std::string& time = "2020-01-01T00:00:00Z") {
    return R"({"article_id":")" + id + R"(","event_id":")" + event +
           R"(","title":"some headline","publisher_domain":"pub.example","published_at":")" +
           time + R"(","category":")" + category + R"("})";
}

} // namespace

TEST_CASE("load_articles accepts well-formed lines") {
    const auto result = parse_articles(
        {article_line("a1", "e1"), article_line("a2", "e1"), article_line("a3", "e2")});
    CHECK(result.articles.size() == 3);
    CHECK(result.rejections.empty());
    CHECK(result.articles[0].publisher_domain == "pub.example");
}

TEST_CASE("unknown category is rejected, not dropped silently") {
    const auto result = parse_articles({article_line("a1", "e1"), article_line("a2", "e1"),
                                        article_line("a3", "e2", "weather")});
    CHECK(result.articles.size() == 2);
    REQUIRE(result.rejections.size() == 1);
    CHECK(result.rejections[0].line_no == 3);
    CHECK(result.rejections[0].reason.find("unknown category") != std::string::npos);
    CHECK(result.rejections[0].reason.find("weather") != std::string::npos);
}

TEST_CASE("duplicate article_id is fatal and names the id") {
    CHECK_THROWS_WITH_AS(parse_articles({article_line("a1", "e1"), article_line("a1", "e2")}),
                         doctest::Contains("a1"), ValidationError);
}

TEST_CASE("malformed lines are collected with causes") {
    const auto result = parse_articles({
        "not json at all",
        R"({"event_id":"e1","title":"x","publisher_domain":"p","published_at":"2020-01-01T00:00:00Z","category":"games"})",
        R"({"article_id":"a1","event_id":"e1","title":"   ","publisher_domain":"p","published_at":"2020-01-01T00:00:00Z","category":"games"})",
        article_line("a2", "e1", "games", "01/02/2020"),
    });
    CHECK(result.articles.empty());
    REQUIRE(result.rejections.size() == 4);
    CHECK(result.rejections[0].reason == "invalid JSON record");
    CHECK(result.rejections[1].reason.find("article_id") != std::string::npos);
    CHECK(result.rejections[2].reason.find("title") != std::string::npos);
    CHECK(result.rejections[3].reason.find("ISO-8601") != std::string::npos);
}

TEST_CASE("missing body is accepted, unknown fields ignored") {
    const auto result = parse_articles(
        {R"({"article_id":"a1","event_id":"e1","title":"t","publisher_domain":"p","published_at":"2020-01-01T00:00:00Z","category":"games","body":"text","extra_field":7})"});
    REQUIRE(result.articles.size() == 1);
    CHECK(result.articles[0].body == "text");
}

TEST_CASE("timestamps must be UTC") {
    CHECK(parse_iso8601_utc("2016-07-18T19:48:00Z").has_value());
    CHECK(parse_iso8601_utc("2016-07-18T19:48:00+00:00").has_value());
    CHECK(parse_iso8601_utc("2016-07-18T19:48:00.123Z").has_value());
    CHECK_FALSE(parse_iso8601_utc("2016-07-18T19:48:00+02:00").has_value());
    CHECK_FALSE(parse_iso8601_utc("2016-07-18T19:48:00").has_value());
    CHECK_FALSE(parse_iso8601_utc("2016-13-01T00:00:00Z").has_value());
    CHECK_FALSE(parse_iso8601_utc("2016-02-30T00:00:00Z").has_value());
    // ordering is by instant, not by string
    CHECK(*parse_iso8601_utc("2016-07-18T19:48:00Z") <
          *parse_iso8601_utc("2016-07-18T22:04:00Z"));
}

TEST_CASE("group_by_event partitions and orders") {
    std::vector<NewsArticle> articles;
    articles.push_back(make_article("a1", "e1", "p1.example"));
    articles.push_back(make_article("a2", "e1", "p2.example"));
    articles.push_back(make_article("a3", "e2", "p1.example"));
    articles.push_back(make_article("a4", "e1", "p3.example"));
    const auto groups = group_by_event(articles);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].event_id == "e1");
    CHECK(groups[0].articles.size() == 3);
    CHECK(groups[1].event_id == "e2");
    CHECK(groups[1].articles.size() == 1);
}

TEST_CASE("group_by_event on empty input") {
    CHECK(group_by_event({}).empty());
}

TEST_CASE("within-group ties break by article_id") {
    std::vector<NewsArticle> articles;
    articles.push_back(make_article("a2", "e1", "p.example"));
    articles.push_back(make_article("a1", "e1", "p.example"));
    const auto groups = group_by_event(articles);
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].articles[0].article_id == "a1");
    CHECK(groups[0].articles[1].article_id == "a2");
}

TEST_CASE("within-group order is primarily by time") {
    auto early = make_article("z9", "e1", "p.example");
    auto late = make_article("a1", "e1", "p.example");
    late.published_at = "2021-06-01T12:00:00Z";
    late.published_epoch = *parse_iso8601_utc(late.published_at);
    const auto groups = group_by_event({late, early});
    CHECK(groups[0].articles[0].article_id == "z9");
}

TEST_CASE("partition property: group sizes sum to the input count") {
    Rng rng(11);
    std::vector<NewsArticle> articles;
    for (int i = 0; i < 200; ++i)
        articles.push_back(make_article("a" + std::to_string(i),
                                        "e" + std::to_string(rng.bounded(37)), "p.example"));
    const auto groups = group_by_event(articles);
    std::size_t total = 0;
    for (const auto& group : groups) {
        total += group.articles.size();
        for (const auto& article : group.articles) CHECK(article.event_id == group.event_id);
    }
    CHECK(total == articles.size());
}

TEST_CASE("grouping is deterministic") {
    Rng rng(12);
    std::vector<NewsArticle> articles;
    for (int i = 0; i < 100; ++i)
        articles.push_back(make_article("a" + std::to_string(i),
                                        "e" + std::to_string(rng.bounded(10)), "p.example"));
    const auto a = group_by_event(articles);
    const auto b = group_by_event(articles);
    REQUIRE(a.size() == b.size());
    for (std::size_t g = 0; g < a.size(); ++g) {
        CHECK(a[g].event_id == b[g].event_id);
        REQUIRE(a[g].articles.size() == b[g].articles.size());
        for (std::size_t i = 0; i < a[g].articles.size(); ++i)
            CHECK(a[g].articles[i].article_id == b[g].articles[i].article_id);
    }
}

TEST_CASE("filter_annotatable keeps events whose publishers carry the metadata") {
    Rng rng(21);
    ProfileRegistry registry = synthetic_registry(2, rng);
    const std::vector<EventGroup> groups = group_by_event(
        {make_article("a1", "e1", "pub0.example"), make_article("a2", "e1", "pub1.example")});
    const auto result = filter_annotatable(groups, registry, BarrierKind::geographical);
    CHECK(result.kept.size() == 1);
    CHECK(result.dropped.empty());
}

TEST_CASE("event whose only publisher lacks alignment is dropped for political") {
    Rng rng(22);
    ProfileRegistry registry;
    registry.countries.emplace("x", make_country("X", rng));
    add_publisher(registry, "nopol.example", "X", "English", std::nullopt);
    recompute_bounds(registry);

    const std::vector<EventGroup> groups =
        group_by_event({make_article("a1", "e1", "nopol.example")});
    const auto result = filter_annotatable(groups, registry, BarrierKind::political);
    CHECK(result.kept.empty());
    REQUIRE(result.dropped.size() == 1);
    CHECK(result.dropped[0].event_id == "e1");
    CHECK(result.dropped[0].reason.find("missing alignment") != std::string::npos);
}

TEST_CASE("synthetic fixture: 3 of 10 events use unregistered publishers") {
    // The oracle is a direct scan of the same fixture.
    Rng rng(23);
    ProfileRegistry registry = synthetic_registry(4, rng);
    std::vector<NewsArticle> articles;
    for (int e = 0; e < 10; ++e) {
        const bool unregistered = e % 3 == 0 && e > 0; // events e3, e6, e9
        const std::string domain =
            unregistered ? "ghost.example" : "pub" + std::to_string(e % 4) + ".example";
        articles.push_back(
            make_article("a" + std::to_string(e), "e" + std::to_string(e), domain));
    }
    std::size_t expected_dropped = 0;
    for (const auto& article : articles)
        if (!registry.find_publisher(article.publisher_domain)) ++expected_dropped;
    CHECK(expected_dropped == 3);

    const auto result =
        filter_annotatable(group_by_event(articles), registry, BarrierKind::geographical);
    CHECK(result.kept.size() == 7);
    CHECK(result.dropped.size() == 3);
}

TEST_CASE("filtering reduces groups but never rewrites articles") {
    Rng rng(24);
    ProfileRegistry registry = synthetic_registry(3, rng);
    // pub2 loses its alignment: political filtering must shrink mixed events.
    registry.publishers[fold_key("pub2.example")].political_alignment.reset();

    std::vector<NewsArticle> articles;
    for (int i = 0; i < 60; ++i)
        articles.push_back(make_article("a" + std::to_string(i),
                                        "e" + std::to_string(rng.bounded(12)),
                                        "pub" + std::to_string(rng.bounded(3)) + ".example"));
    const auto groups = group_by_event(articles);
    for (BarrierKind barrier : kAllBarriers) {
        const auto result = filter_annotatable(groups, registry, barrier);
        REQUIRE(result.kept.size() + result.dropped.size() <= groups.size());
        std::size_t kept_articles = 0;
        for (const auto& group : result.kept) {
            kept_articles += group.articles.size();
            const auto original =
                std::find_if(groups.begin(), groups.end(),
                             [&](const EventGroup& g) { return g.event_id == group.event_id; });
            REQUIRE(original != groups.end());
            CHECK(group.articles.size() <= original->articles.size());
            for (const auto& article : group.articles) {
                const auto match = std::find_if(
                    original->articles.begin(), original->articles.end(),
                    [&](const NewsArticle& a) { return a.article_id == article.article_id; });
                REQUIRE(match != original->articles.end());
                CHECK(match->title == article.title);
                CHECK(match->publisher_domain == article.publisher_domain);
            }
        }
        CHECK(kept_articles + result.removed_articles.size() == articles.size());
    }
}

TEST_CASE("article json round-trip") {
    auto article = make_article("a1", "e1", "pub.example", Category::games, "Some Title");
    article.body = "body text";
    const auto result = parse_articles({article_to_json_line(article)});
    REQUIRE(result.articles.size() == 1);
    CHECK(result.articles[0].article_id == article.article_id);
    CHECK(result.articles[0].body == article.body);
    CHECK(result.articles[0].category == article.category);
    CHECK(result.articles[0].published_epoch == article.published_epoch);
}

TEST_CASE("load_articles on a missing file is a fatal io error") {
    CHECK_THROWS_AS(load_articles("/nonexistent/path/articles.jsonl"), IoError);
}

TEST_SUITE_END();
