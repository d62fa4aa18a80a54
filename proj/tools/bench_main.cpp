// Times the OpenMP kernels against their serial reference implementations and
// verifies that both produce identical results.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <omp.h>

#include "barriers/corpus.hpp"
#include "barriers/features.hpp"
#include "barriers/labeler.hpp"
#include "barriers/models.hpp"
#include "barriers/profiles.hpp"
#include "barriers/rng.hpp"
#include "barriers/sentiment.hpp"

using namespace barriers;

namespace {

struct Timing {
    double serial_ms = 0.0;
    double parallel_ms = 0.0;
    bool identical = false;
};

template <typename SerialFn, typename ParallelFn, typename Eq>
Timing time_pair(SerialFn serial, ParallelFn parallel, Eq equal) {
    Timing t;
    (void)parallel(); // warm-up: fault in pages and spin up the thread pool
    double start = omp_get_wtime();
    auto serial_result = serial();
    t.serial_ms = (omp_get_wtime() - start) * 1000.0;
    start = omp_get_wtime();
    auto parallel_result = parallel();
    t.parallel_ms = (omp_get_wtime() - start) * 1000.0;
    t.identical = equal(serial_result, parallel_result);
    return t;
}

void print_row(const char* name, const Timing& t) {
    std::printf("%-22s %10.1f ms %10.1f ms %8.2fx   %s\n", name, t.serial_ms, t.parallel_ms,
                t.serial_ms / std::max(1e-9, t.parallel_ms),
                t.identical ? "identical" : "MISMATCH");
}

std::vector<std::string> synthetic_texts(std::size_t n, Rng& rng) {
    static const char* words[] = {"market", "good",   "bad",    "win",    "loss",  "summit",
                                  "not",    "very",   "crisis", "talks",  "deal",  "vote",
                                  "rally",  "slump",  "growth", "record", "storm", "calm",
                                  "happy",  "angry",  "plan",   "report", "law",   "trade"};
    std::vector<std::string> texts(n);
    for (std::string& text : texts) {
        const std::size_t len = 5 + rng.bounded(8);
        for (std::size_t w = 0; w < len; ++w) {
            if (w) text += ' ';
            text += words[rng.bounded(std::size(words))];
        }
    }
    return texts;
}

ValenceLexicon bench_lexicon() {
    ValenceLexicon lexicon;
    lexicon.valences = {{"good", 1.9},   {"bad", -2.5},  {"win", 2.8},   {"loss", -1.3},
                        {"crisis", -3.1}, {"happy", 2.7}, {"angry", -2.3}, {"calm", 1.3},
                        {"growth", 1.4},  {"slump", -1.9}};
    lexicon.negators = {"not", "no", "never"};
    lexicon.boosters = {{"very", 0.293}, {"slightly", -0.293}};
    return lexicon;
}

bool scores_equal(const std::vector<SentimentScore>& a, const std::vector<SentimentScore>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].compound != b[i].compound || a[i].polarity != b[i].polarity) return false;
    return true;
}

bool rows_equal(const std::vector<SparseVector>& a, const std::vector<SparseVector>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size()) return false;
        for (std::size_t j = 0; j < a[i].size(); ++j)
            if (a[i][j].index != b[i][j].index || a[i][j].value != b[i][j].value) return false;
    }
    return true;
}

ProfileRegistry bench_registry(std::size_t n_countries, std::size_t n_publishers, Rng& rng) {
    ProfileRegistry registry;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n_countries; ++i) {
        CountryProfile country;
        country.country = "country" + std::to_string(i);
        std::array<double, kCulturalDims> cultural;
        for (double& v : cultural) v = rng.uniform(0.0, 100.0);
        std::array<double, kEconomicDims> economic;
        for (double& v : economic) v = rng.uniform(0.0, 100.0);
        country.cultural = cultural;
        country.economic = economic;
        names.push_back(country.country);
        registry.countries.emplace(fold_key(country.country), std::move(country));
    }
    for (const auto& [key, country] : registry.countries) {
        for (std::size_t d = 0; d < kCulturalDims; ++d) {
            auto& b = registry.bounds.cultural[d];
            const double v = (*country.cultural)[d];
            if (registry.bounds.cultural_count == 0) b = {v, v};
            b.min = std::min(b.min, v);
            b.max = std::max(b.max, v);
        }
        ++registry.bounds.cultural_count;
        for (std::size_t d = 0; d < kEconomicDims; ++d) {
            auto& b = registry.bounds.economic[d];
            const double v = (*country.economic)[d];
            if (registry.bounds.economic_count == 0) b = {v, v};
            b.min = std::min(b.min, v);
            b.max = std::max(b.max, v);
        }
        ++registry.bounds.economic_count;
    }
    static const char* languages[] = {"English", "Spanish", "German"};
    static const char* alignments[] = {"left-wing", "centre-right", "conservatism", "neutral"};
    for (std::size_t i = 0; i < n_publishers; ++i) {
        PublisherProfile publisher;
        publisher.domain = "pub" + std::to_string(i) + ".example";
        publisher.country = names[rng.bounded(names.size())];
        publisher.publishing_language = languages[rng.bounded(std::size(languages))];
        publisher.political_alignment = alignments[rng.bounded(std::size(alignments))];
        registry.publishers.emplace(publisher.domain, std::move(publisher));
    }
    return registry;
}

std::vector<EventGroup> bench_events(std::size_t n_events, const ProfileRegistry& registry,
                                     Rng& rng) {
    std::vector<std::string> domains;
    for (const auto& [domain, publisher] : registry.publishers) domains.push_back(domain);
    std::vector<EventGroup> groups(n_events);
    std::size_t article_no = 0;
    for (std::size_t e = 0; e < n_events; ++e) {
        groups[e].event_id = "e" + std::to_string(e);
        const std::size_t size = 1 + rng.bounded(5);
        for (std::size_t a = 0; a < size; ++a) {
            NewsArticle article;
            article.article_id = "a" + std::to_string(article_no++);
            article.event_id = groups[e].event_id;
            article.title = "headline";
            article.publisher_domain = domains[rng.bounded(domains.size())];
            article.published_at = "2020-01-01T00:00:00Z";
            article.category = Category::society;
            groups[e].articles.push_back(std::move(article));
        }
    }
    return groups;
}

bool annotations_equal(const AnnotateResult& a, const AnnotateResult& b) {
    if (a.annotations.size() != b.annotations.size()) return false;
    for (std::size_t i = 0; i < a.annotations.size(); ++i) {
        const EventAnnotation& x = a.annotations[i];
        const EventAnnotation& y = b.annotations[i];
        if (x.event_id != y.event_id || x.cultural != y.cultural || x.economic != y.economic ||
            x.political != y.political || x.linguistic != y.linguistic ||
            x.geographical != y.geographical || x.provenance != y.provenance)
            return false;
    }
    return a.failures.size() == b.failures.size();
}

} // namespace

int main(int argc, char** argv) {
    const std::size_t scale = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
    std::printf("threads: %d, scale: %zu\n\n", omp_get_max_threads(), scale);
    std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    Rng rng(42);

    {
        const auto texts = synthetic_texts(400000 * scale, rng);
        const ValenceLexicon lexicon = bench_lexicon();
        print_row("sentiment scoring",
                  time_pair([&] { return score_texts_serial(texts, lexicon); },
                            [&] { return score_texts(texts, lexicon); }, scores_equal));
    }
    {
        const auto texts = synthetic_texts(300000 * scale, rng);
        TokenizerConfig tokenizer;
        std::vector<std::vector<std::string>> docs;
        docs.reserve(texts.size());
        for (const std::string& text : texts) docs.push_back(preprocess(text, tokenizer));
        const Vectorizer vectorizer = Vectorizer::fit(docs);
        print_row("tf-idf transform",
                  time_pair([&] { return vectorizer.transform_many_serial(docs); },
                            [&] { return vectorizer.transform_many(docs); }, rows_equal));
    }
    {
        const ProfileRegistry registry = bench_registry(60, 400, rng);
        const auto groups = bench_events(120000 * scale, registry, rng);
        print_row("event annotation",
                  time_pair([&] { return annotate_corpus_serial(groups, registry); },
                            [&] { return annotate_corpus(groups, registry); },
                            annotations_equal));
    }
    {
        const auto texts = synthetic_texts(4000 * scale, rng);
        TokenizerConfig tokenizer;
        std::vector<std::vector<std::string>> docs;
        for (const std::string& text : texts) docs.push_back(preprocess(text, tokenizer));
        const Vectorizer vectorizer = Vectorizer::fit(docs);
        FeatureMatrix data;
        data.rows = vectorizer.transform_many(docs);
        data.n_features = vectorizer.size();
        data.class_names = {"a", "b"};
        data.labels.resize(data.rows.size());
        for (std::size_t i = 0; i < data.labels.size(); ++i) data.labels[i] = rng.bounded(2);
        Hyperparams hp;
        const TrainedModel model = train(ModelKind::knn, data, hp);
        print_row("knn prediction",
                  time_pair([&] { return predict_serial(model, data.rows); },
                            [&] { return predict(model, data.rows); },
                            [](const auto& a, const auto& b) { return a == b; }));
    }
    return 0;
}
