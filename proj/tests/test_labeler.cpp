#include <doctest.h>

#include <algorithm>
#include <set>

#include "barriers/labeler.hpp"
#include "helpers.hpp"

using namespace barriers;
using namespace test_helpers;

TEST_SUITE_BEGIN("labeler");

namespace {

// Registry with one publisher per (country, language, alignment) combination,
// named after its row in `publishers`.
struct Fixture {
    ProfileRegistry registry;

    Fixture() {
        Rng rng(101);
        registry.countries.emplace("united states", make_country("United States", rng));
        registry.countries.emplace("ireland", make_country("Ireland", rng));
        registry.countries.emplace("thailand", make_country("Thailand", rng));
        recompute_bounds(registry);

        add_publisher(registry, "us1.example", "United States", "English", "conservatism");
        add_publisher(registry, "us2.example", "United States", "English", "conservatism");
        add_publisher(registry, "us3.example", "United States", "Spanish", "centre-right");
        add_publisher(registry, "ie.example", "Ireland", "English", "left-wing");
        add_publisher(registry, "th.example", "Thailand", "English", "neutral");
    }

    EventGroup event(std::initializer_list<const char*> domains) const {
        EventGroup group{"e1", {}};
        int i = 0;
        for (const char* domain : domains)
            group.articles.push_back(make_article("a" + std::to_string(i++), "e1", domain));
        return group;
    }
};

// Independent reference labeler: recomputes every label from first principles
// with its own pair enumeration.
struct BruteForce {
    const ProfileRegistry& registry;

    std::set<std::string> values(const EventGroup& event, auto projection) const {
        std::set<std::string> out;
        for (const auto& article : event.articles)
            out.insert(projection(*registry.find_publisher(article.publisher_domain)));
        return out;
    }

    BinaryLabel geographical(const EventGroup& event) const {
        return values(event, [](const PublisherProfile& p) { return fold_key(p.country); })
                           .size() == 1
                   ? BinaryLabel::not_crossed
                   : BinaryLabel::crossed;
    }

    BinaryLabel linguistic(const EventGroup& event) const {
        return values(event,
                      [](const PublisherProfile& p) { return fold_key(p.publishing_language); })
                           .size() == 1
                   ? BinaryLabel::not_crossed
                   : BinaryLabel::crossed;
    }

    BinaryLabel political(const EventGroup& event) const {
        return values(event,
                      [](const PublisherProfile& p) { return fold_key(*p.political_alignment); })
                           .size() == 1
                   ? BinaryLabel::not_crossed
                   : BinaryLabel::crossed;
    }

    TernaryLabel ternary(const EventGroup& event, VectorKind kind) const {
        const auto countries =
            values(event, [](const PublisherProfile& p) { return fold_key(p.country); });
        std::vector<std::string> list(countries.begin(), countries.end());
        bool any_crossing = false;
        bool any_unsure = false;
        for (std::size_t i = 0; i < list.size(); ++i)
            for (std::size_t j = i + 1; j < list.size(); ++j) {
                const double d =
                    normalized_distance(*registry.find_country(list[i]),
                                        *registry.find_country(list[j]), kind,
                                        registry.bounds);
                if (d > 0.4) any_crossing = true;
                else if (d > 0.1) any_unsure = true;
            }
        if (any_crossing) return TernaryLabel::information_crossing;
        if (any_unsure) return TernaryLabel::unsure;
        return TernaryLabel::information_not_crossing;
    }
};

} // namespace

TEST_CASE("geographical: same country publishers do not cross") {
    Fixture f;
    CHECK(label_geographical(f.event({"us1.example", "us2.example"}), f.registry) ==
          BinaryLabel::not_crossed);
}

TEST_CASE("geographical: Ireland and Thailand cross") {
    Fixture f;
    CHECK(label_geographical(f.event({"ie.example", "th.example"}), f.registry) ==
          BinaryLabel::crossed);
}

TEST_CASE("geographical: a single-article event never crosses") {
    Fixture f;
    CHECK(label_geographical(f.event({"ie.example"}), f.registry) == BinaryLabel::not_crossed);
}

TEST_CASE("linguistic: all English does not cross, mixed languages cross") {
    Fixture f;
    CHECK(label_linguistic(f.event({"us1.example", "ie.example", "th.example"}), f.registry) ==
          BinaryLabel::not_crossed);
    CHECK(label_linguistic(f.event({"us3.example", "us1.example", "ie.example"}), f.registry) ==
          BinaryLabel::crossed);
    CHECK(label_linguistic(f.event({"us3.example"}), f.registry) == BinaryLabel::not_crossed);
}

TEST_CASE("political: exact equality after case folding") {
    Fixture f;
    // {conservatism, conservatism, centre-right}: equality is strict, so this
    // crosses even though the alignments are adjacent camps.
    CHECK(label_political(f.event({"us1.example", "us2.example", "us3.example"}), f.registry) ==
          BinaryLabel::crossed);
    CHECK(label_political(f.event({"th.example", "us1.example", "ie.example"}), f.registry) ==
          BinaryLabel::crossed);
    CHECK(label_political(f.event({"ie.example", "ie.example"}), f.registry) ==
          BinaryLabel::not_crossed);
}

TEST_CASE("political: an alignment-synonym table coarsens equality") {
    Fixture f;
    LabelerOptions options;
    AlignmentSynonyms synonyms;
    synonyms.classes["conservatism"] = "right";
    synonyms.classes["centre-right"] = "right";
    options.alignment_synonyms = synonyms;
    CHECK(label_political(f.event({"us1.example", "us2.example", "us3.example"}), f.registry,
                          options) == BinaryLabel::not_crossed);
    CHECK(label_political(f.event({"us1.example", "ie.example"}), f.registry, options) ==
          BinaryLabel::crossed);
}

TEST_CASE("neutral is a value, not a wildcard") {
    Fixture f;
    CHECK(label_political(f.event({"th.example", "us1.example"}), f.registry) ==
          BinaryLabel::crossed);
}

TEST_CASE("ternary: identical countries yield not-crossing") {
    Fixture f;
    CHECK(label_ternary(f.event({"us1.example", "us2.example"}), f.registry,
                        BarrierKind::cultural) == TernaryLabel::information_not_crossing);
}

TEST_CASE("pair label aggregation is the maximum by severity") {
    using T = TernaryLabel;
    const T nc = T::information_not_crossing;
    const T us = T::unsure;
    const T cr = T::information_crossing;

    CHECK(aggregate_pair_labels(std::vector<T>{nc, us}) == us);
    CHECK(aggregate_pair_labels(std::vector<T>{us, cr}) == cr);
    CHECK(aggregate_pair_labels(std::vector<T>{}) == nc);

    // Brute-force oracle over every multiset of size <= 3: aggregation must
    // implement "any crossing, else any unsure, else not-crossing".
    const std::vector<T> values = {nc, us, cr};
    std::vector<std::vector<T>> cases = {{}};
    for (int len = 1; len <= 3; ++len)
        for (const T a : values)
            for (const T b : values)
                for (const T c : values) {
                    std::vector<T> labels = {a, b, c};
                    labels.resize(static_cast<std::size_t>(len));
                    cases.push_back(labels);
                }
    for (const auto& labels : cases) {
        const bool any_cr = std::count(labels.begin(), labels.end(), cr) > 0;
        const bool any_us = std::count(labels.begin(), labels.end(), us) > 0;
        const T expected = any_cr ? cr : any_us ? us : nc;
        CHECK(aggregate_pair_labels(labels) == expected);
    }
}

TEST_CASE("annotate_corpus: all-equal metadata yields all not-crossed") {
    Fixture f;
    const std::vector<EventGroup> groups = {f.event({"us1.example", "us2.example"})};
    const auto result = annotate_corpus(groups, f.registry);
    REQUIRE(result.annotations.size() == 1);
    CHECK(result.failures.empty());
    const EventAnnotation& a = result.annotations[0];
    CHECK(a.geographical == BinaryLabel::not_crossed);
    CHECK(a.linguistic == BinaryLabel::not_crossed);
    CHECK(a.political == BinaryLabel::not_crossed);
    CHECK(a.cultural == TernaryLabel::information_not_crossing);
    CHECK(a.economic == TernaryLabel::information_not_crossing);
    CHECK(a.provenance.at(BarrierKind::geographical).find("united states") !=
          std::string::npos);
}

TEST_CASE("annotate_corpus matches the independent brute-force labeler") {
    Rng rng(102);
    ProfileRegistry registry = synthetic_registry(5, rng);
    std::vector<EventGroup> groups;
    int article_no = 0;
    for (int e = 0; e < 20; ++e) {
        EventGroup group{"e" + std::to_string(e), {}};
        const std::size_t size = 1 + rng.bounded(4);
        for (std::size_t a = 0; a < size; ++a)
            group.articles.push_back(make_article(
                "a" + std::to_string(article_no++), group.event_id,
                "pub" + std::to_string(rng.bounded(5)) + ".example"));
        groups.push_back(std::move(group));
    }

    const auto result = annotate_corpus(groups, registry);
    REQUIRE(result.annotations.size() == groups.size());
    CHECK(result.failures.empty());

    const BruteForce oracle{registry};
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const EventAnnotation& a = result.annotations[i];
        CHECK(a.geographical == oracle.geographical(groups[i]));
        CHECK(a.linguistic == oracle.linguistic(groups[i]));
        CHECK(a.political == oracle.political(groups[i]));
        CHECK(a.cultural == oracle.ternary(groups[i], VectorKind::cultural));
        CHECK(a.economic == oracle.ternary(groups[i], VectorKind::economic));
    }
}

TEST_CASE("missing economic vectors suppress only the economic label") {
    Rng rng(103);
    ProfileRegistry registry;
    CountryProfile no_econ = make_country("Poordata", rng, true, false);
    registry.countries.emplace(fold_key(no_econ.country), no_econ);
    registry.countries.emplace("fulldata", make_country("Fulldata", rng));
    recompute_bounds(registry);
    add_publisher(registry, "pd.example", "Poordata");
    add_publisher(registry, "fd.example", "Fulldata");

    // Every publisher lacks the economic vector: no economic label at all.
    const std::vector<EventGroup> all_missing =
        group_by_event({make_article("a1", "e1", "pd.example"),
                        make_article("a2", "e1", "pd.example")});
    const auto total = annotate_corpus(all_missing, registry).annotations[0];
    CHECK_FALSE(total.has_label(BarrierKind::economic));
    CHECK(total.geographical.has_value());
    CHECK(total.linguistic.has_value());
    CHECK(total.cultural.has_value());

    // A mixed event keeps the label, computed from the one usable article.
    const std::vector<EventGroup> mixed =
        group_by_event({make_article("a3", "e2", "pd.example"),
                        make_article("a4", "e2", "fd.example")});
    const auto partial = annotate_corpus(mixed, registry).annotations[0];
    REQUIRE(partial.has_label(BarrierKind::economic));
    CHECK(partial.economic == TernaryLabel::information_not_crossing);
    CHECK(partial.provenance.at(BarrierKind::economic).find("poordata") == std::string::npos);
    CHECK(partial.provenance.at(BarrierKind::economic).find("fulldata") != std::string::npos);
}

TEST_CASE("labels are invariant under article permutation and duplication") {
    Rng rng(104);
    ProfileRegistry registry = synthetic_registry(6, rng);
    EventGroup event{"e1", {}};
    for (int i = 0; i < 4; ++i)
        event.articles.push_back(make_article(
            "a" + std::to_string(i), "e1", "pub" + std::to_string(rng.bounded(6)) + ".example"));

    const auto base = annotate_corpus({event}, registry).annotations[0];

    EventGroup reversed = event;
    std::reverse(reversed.articles.begin(), reversed.articles.end());
    const auto permuted = annotate_corpus({reversed}, registry).annotations[0];
    CHECK(permuted.geographical == base.geographical);
    CHECK(permuted.linguistic == base.linguistic);
    CHECK(permuted.political == base.political);
    CHECK(permuted.cultural == base.cultural);
    CHECK(permuted.economic == base.economic);

    EventGroup duplicated = event;
    NewsArticle copy = event.articles[0];
    copy.article_id = "a_dup";
    duplicated.articles.push_back(copy);
    const auto extended = annotate_corpus({duplicated}, registry).annotations[0];
    CHECK(extended.geographical == base.geographical);
    CHECK(extended.linguistic == base.linguistic);
    CHECK(extended.political == base.political);
    CHECK(extended.cultural == base.cultural);
    CHECK(extended.economic == base.economic);
}

TEST_CASE("geographic not-crossed forces both ternary labels to not-crossing") {
    Rng rng(105);
    ProfileRegistry registry = synthetic_registry(4, rng);
    for (int trial = 0; trial < 50; ++trial) {
        EventGroup event{"e", {}};
        const std::string domain = "pub" + std::to_string(rng.bounded(4)) + ".example";
        const std::size_t size = 1 + rng.bounded(3);
        for (std::size_t i = 0; i < size; ++i)
            event.articles.push_back(make_article("a" + std::to_string(i), "e", domain));
        const auto annotation = annotate_corpus({event}, registry).annotations[0];
        REQUIRE(annotation.geographical == BinaryLabel::not_crossed);
        CHECK(annotation.cultural == TernaryLabel::information_not_crossing);
        CHECK(annotation.economic == TernaryLabel::information_not_crossing);
    }
}

TEST_CASE("unknown publishers surface as per-event failures, not exceptions") {
    Fixture f;
    EventGroup bad{"e9", {make_article("a1", "e9", "ghost.example")}};
    const std::vector<EventGroup> groups = {bad, f.event({"us1.example"})};
    const auto result = annotate_corpus(groups, f.registry);
    REQUIRE(result.annotations.size() == 2);
    // the ghost event has no label for any barrier
    for (BarrierKind barrier : kAllBarriers)
        CHECK_FALSE(result.annotations[0].has_label(barrier));
    CHECK(result.annotations[1].geographical.has_value());
}

TEST_CASE("label rendering carries the barrier suffix") {
    CHECK(binary_label_name(BinaryLabel::crossed, BarrierKind::geographical) == "Crossed-GB");
    CHECK(binary_label_name(BinaryLabel::not_crossed, BarrierKind::political) ==
          "Not-crossed-PB");
    CHECK(binary_label_name(BinaryLabel::crossed, BarrierKind::linguistic) == "Crossed-LB");
    CHECK(ternary_label_name(TernaryLabel::unsure) == "unsure");
}

TEST_SUITE_END();
