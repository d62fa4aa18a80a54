#include <doctest.h>

#include <map>
#include <set>

#include "barriers/inference.hpp"
#include "barriers/rng.hpp"
#include "helpers.hpp"

using namespace barriers;
using namespace test_helpers;

TEST_SUITE_BEGIN("inference");

TEST_CASE("load_inferences groups triples by article in input order") {
    const auto dir = temp_dir("inference_load");
    const std::string path = write_file(dir / "inf.tsv",
                                        "a1\treact\tangry\n"
                                        "a1\twant\tto protest\n"
                                        "a1\tneed\tto make a speech\n");
    const auto result = load_inferences(path, RelationTable::defaults());
    CHECK(result.rejections.empty());
    REQUIRE(result.set.by_article.size() == 1);
    const auto triples = result.set.for_article("a1");
    REQUIRE(triples.size() == 3);
    CHECK(triples[0].relation == "react");
    CHECK(triples[1].relation == "want");
    CHECK(triples[2].relation == "need");
}

TEST_CASE("unknown relations are rejected with a report") {
    const auto dir = temp_dir("inference_unknown");
    const std::string path = write_file(dir / "inf.tsv",
                                        "a1\tfoo\tsomething\n"
                                        "a1\treact\tcalm\n");
    const auto result = load_inferences(path, RelationTable::defaults());
    CHECK(result.set.for_article("a1").size() == 1);
    REQUIRE(result.rejections.size() == 1);
    CHECK(result.rejections[0].reason.find("unknown relation") != std::string::npos);
    CHECK(result.rejections[0].reason.find("foo") != std::string::npos);
}

TEST_CASE("config can extend the relation set") {
    const auto dir = temp_dir("inference_extend");
    const std::string path = write_file(dir / "inf.tsv", "a1\txAttr\tstubborn\n");
    RelationTable table = RelationTable::defaults();
    CHECK(load_inferences(path, table).rejections.size() == 1);
    table.add("xAttr", "was seen as");
    const auto result = load_inferences(path, table);
    CHECK(result.rejections.empty());
    CHECK(verbalize(result.set.for_article("a1")[0], table) == "was seen as stubborn");
}

TEST_CASE("empty files load as empty sets") {
    const auto dir = temp_dir("inference_empty");
    const auto result =
        load_inferences(write_file(dir / "inf.tsv", ""), RelationTable::defaults());
    CHECK(result.set.by_article.empty());
    CHECK(result.rejections.empty());
}

TEST_CASE("empty tails are rejected") {
    const auto dir = temp_dir("inference_tail");
    const auto result = load_inferences(write_file(dir / "inf.tsv", "a1\treact\t  \n"),
                                        RelationTable::defaults());
    CHECK(result.set.by_article.empty());
    REQUIRE(result.rejections.size() == 1);
    CHECK(result.rejections[0].reason == "empty tail");
}

TEST_CASE("verbalize renders relations in past form") {
    const auto table = RelationTable::defaults();
    CHECK(verbalize({"a", "react", "angry"}, table) == "reacted angry");
    CHECK(verbalize({"a", "need", "to make a speech"}, table) == "needed to make a speech");
    CHECK(verbalize({"a", "intent", "to protest"}, table) == "intended to protest");
    CHECK(verbalize({"a", "want", "to protest"}, table) == "wanted to protest");
    CHECK(verbalize({"a", "isFilledBy", "uproar at the republican convention"}, table) ==
          "isFilledBy uproar at the republican convention");
    CHECK(verbalize({"a", "hasSubEvent", "a recount"}, table) == "hasSubEvent a recount");
    CHECK(verbalize({"a", "capableOf", "voting"}, table) == "capableOf voting");
    CHECK(verbalize({"a", "causes", "confusion"}, table) == "caused confusion");
    CHECK(verbalize({"a", "consists", "three debates"}, table) == "consisted of three debates");
    CHECK(verbalize({"a", "desire", "change"}, table) == "desired change");
}

TEST_CASE("verbalize is injective per relation for distinct tails") {
    const auto table = RelationTable::defaults();
    std::set<std::string> rendered;
    const char* tails[] = {"alpha", "beta", "gamma", "alpha beta"};
    for (const auto& [relation, form] : table.past_form)
        for (const char* tail : tails) rendered.insert(verbalize({"a", relation, tail}, table));
    // "intent" and "intend" share a template; all other combinations differ
    CHECK(rendered.size() == (table.past_form.size() - 1) * 4);
}

TEST_CASE("augment_text concatenates phrases and the sentiment token") {
    const auto table = RelationTable::defaults();
    CHECK(augment_text("X wins", {}, Polarity::positive, table) == "X wins SENTTOKEN_positive");

    const std::vector<InferenceTriple> triples = {{"a", "react", "angry"},
                                                  {"a", "want", "to protest"}};
    CHECK(augment_text("Uproar...", triples, Polarity::negative, table) ==
          "Uproar.... reacted angry. wanted to protest SENTTOKEN_negative");
}

TEST_CASE("augment_text with sentiment disabled and no triples is the identity") {
    const auto table = RelationTable::defaults();
    AugmentOptions options;
    options.include_sentiment = false;
    CHECK(augment_text("Plain headline", {}, Polarity::neutral, table, options) ==
          "Plain headline");
    const std::vector<InferenceTriple> triples = {{"a", "causes", "confusion"}};
    CHECK(augment_text("Plain headline", triples, Polarity::neutral, table, options) ==
          "Plain headline. caused confusion");
}

TEST_CASE("relation_stats averages per headline within a category") {
    std::vector<NewsArticle> articles = {
        make_article("a1", "e1", "p.example", Category::games),
        make_article("a2", "e1", "p.example", Category::games),
        make_article("a3", "e2", "p.example", Category::health),
    };
    InferenceSet inferences;
    for (int i = 0; i < 3; ++i) inferences.by_article["a1"].push_back({"a1", "causes", "x"});
    for (int i = 0; i < 2; ++i) inferences.by_article["a2"].push_back({"a2", "causes", "y"});
    inferences.by_article["a2"].push_back({"a2", "react", "calm"});

    const auto stats = relation_stats(inferences, articles, RelationTable::defaults());
    CHECK(stats.means.at(Category::games).at("causes") == doctest::Approx(2.5));
    CHECK(stats.means.at(Category::games).at("react") == doctest::Approx(0.5));
    CHECK(stats.means.at(Category::games).at("want") == 0.0);
    // a3 has no triples but still counts in the denominator
    CHECK(stats.means.at(Category::health).at("causes") == 0.0);
    CHECK(stats.headline_counts.at(Category::games) == 2);
    // categories with no headlines are omitted entirely
    CHECK(stats.means.count(Category::sports) == 0);
}

TEST_CASE("orphan triples are reported and excluded") {
    std::vector<NewsArticle> articles = {make_article("a1", "e1", "p.example", Category::games)};
    InferenceSet inferences;
    inferences.by_article["a1"].push_back({"a1", "causes", "x"});
    inferences.by_article["ghost"].push_back({"ghost", "causes", "y"});
    const auto stats = relation_stats(inferences, articles, RelationTable::defaults());
    REQUIRE(stats.orphan_articles.size() == 1);
    CHECK(stats.orphan_articles[0] == "ghost");
    CHECK(stats.means.at(Category::games).at("causes") == doctest::Approx(1.0));
}

TEST_CASE("relation_stats is invariant under article reordering") {
    Rng rng(81);
    std::vector<NewsArticle> articles;
    InferenceSet inferences;
    const char* relations[] = {"causes", "react", "want", "need"};
    for (int i = 0; i < 40; ++i) {
        const auto category = static_cast<Category>(rng.bounded(kCategoryCount));
        const std::string id = "a" + std::to_string(i);
        articles.push_back(make_article(id, "e" + std::to_string(i / 3), "p.example", category));
        const std::size_t n = rng.bounded(4);
        for (std::size_t t = 0; t < n; ++t)
            inferences.by_article[id].push_back(
                {id, relations[rng.bounded(4)], "tail" + std::to_string(rng.bounded(9))});
    }
    const auto forward = relation_stats(inferences, articles, RelationTable::defaults());
    std::reverse(articles.begin(), articles.end());
    const auto backward = relation_stats(inferences, articles, RelationTable::defaults());
    CHECK(forward.means == backward.means);
    for (const auto& [category, row] : forward.means)
        for (const auto& [relation, mean] : row) CHECK(mean >= 0.0);
}

TEST_CASE("venn regions for the worked three-set example") {
    const std::map<std::string, std::set<std::string>> sets = {
        {"A", {"1", "2", "3"}}, {"B", {"2", "3", "4"}}, {"C", {"3", "5"}}};
    const auto regions = class_intersections(sets);
    REQUIRE(regions.classes == std::vector<std::string>{"A", "B", "C"});
    CHECK(regions.common_all == 1);                        // {3}
    CHECK(regions.pairwise_only.at({0, 1}) == 1);          // {2}
    CHECK(regions.pairwise_only.at({1, 2}) == 0);
    CHECK(regions.pairwise_only.at({0, 2}) == 0);
    CHECK(regions.unique == std::vector<std::size_t>{1, 1, 1}); // {1}, {4}, {5}
    CHECK(regions.union_size == 5);
}

TEST_CASE("identical sets put everything in the common region") {
    const std::set<std::string> s = {"x", "y", "z"};
    const auto regions = class_intersections({{"A", s}, {"B", s}, {"C", s}});
    CHECK(regions.common_all == 3);
    CHECK(regions.unique == std::vector<std::size_t>{0, 0, 0});
    for (const auto& [pair, count] : regions.pairwise_only) CHECK(count == 0);
}

TEST_CASE("two-set inputs report the plain intersection") {
    const auto regions = class_intersections(
        {{"A", {"1", "2", "3"}}, {"B", {"3", "4"}}});
    CHECK(regions.unique == std::vector<std::size_t>{2, 1});
    CHECK(regions.pairwise_only.at({0, 1}) == 1);
    CHECK(regions.union_size == 4);
}

TEST_CASE("element identity folds case and whitespace") {
    const auto regions = class_intersections(
        {{"A", {"Reacted Angry"}}, {"B", {"  reacted angry "}}});
    CHECK(regions.pairwise_only.at({0, 1}) == 1);
    CHECK(regions.unique == std::vector<std::size_t>{0, 0});
}

TEST_CASE("venn counts match an exhaustive membership-pattern oracle") {
    Rng rng(82);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<std::string, std::set<std::string>> sets;
        std::set<std::string> all;
        for (const char* name : {"one", "two", "three"}) {
            std::set<std::string>& s = sets[name];
            const std::size_t size = rng.bounded(100);
            for (std::size_t i = 0; i < size; ++i) {
                const std::string element = std::to_string(rng.bounded(120));
                s.insert(element);
                all.insert(element);
            }
        }
        const auto regions = class_intersections(sets);

        // oracle: classify each element of the union by its membership pattern
        std::map<std::string, std::size_t> oracle;
        for (const std::string& element : all) {
            std::string pattern;
            for (const auto& [name, s] : sets) pattern += s.count(element) ? '1' : '0';
            ++oracle[pattern];
        }
        auto count = [&](const std::string& pattern) {
            const auto it = oracle.find(pattern);
            return it == oracle.end() ? std::size_t{0} : it->second;
        };
        // sets iterate in key order: one, three, two -> classes[0]="one", [1]="three", [2]="two"
        CHECK(regions.unique[0] == count("100"));
        CHECK(regions.unique[1] == count("010"));
        CHECK(regions.unique[2] == count("001"));
        CHECK(regions.pairwise_only.at({0, 1}) == count("110"));
        CHECK(regions.pairwise_only.at({0, 2}) == count("101"));
        CHECK(regions.pairwise_only.at({1, 2}) == count("011"));
        CHECK(regions.common_all == count("111"));

        std::size_t total = regions.common_all;
        for (std::size_t u : regions.unique) total += u;
        for (const auto& [pair, c] : regions.pairwise_only) total += c;
        CHECK(total == all.size());
        CHECK(regions.union_size == all.size());
    }
}

TEST_CASE("fewer than two sets is an error") {
    CHECK_THROWS_AS(class_intersections({{"A", {"1"}}}), ValidationError);
    CHECK_THROWS_AS(class_intersections({}), ValidationError);
}

TEST_SUITE_END();
