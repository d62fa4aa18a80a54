#include "barriers/labeler.hpp"

#include <algorithm>
#include <set>

namespace barriers {

std::string AlignmentSynonyms::canonical(std::string_view alignment) const {
    const std::string key = fold_key(alignment);
    const auto it = classes.find(key);
    return it == classes.end() ? key : it->second;
}

AlignmentSynonyms load_alignment_synonyms(const std::string& path) {
    AlignmentSynonyms synonyms;
    std::size_t line_no = 0;
    for (const std::string& line : read_lines(path)) {
        ++line_no;
        if (trim(line).empty() || line[0] == '#') continue;
        const auto cells = split(line, '\t');
        if (cells.size() != 2)
            throw ValidationError("alignment synonyms line " + std::to_string(line_no) +
                                  ": expected 2 tab-separated fields");
        synonyms.classes[fold_key(cells[0])] = fold_key(cells[1]);
    }
    return synonyms;
}

namespace {

const PublisherProfile& publisher_or_throw(const NewsArticle& article,
                                           const ProfileRegistry& registry) {
    const PublisherProfile* p = registry.find_publisher(article.publisher_domain);
    if (!p)
        throw ValidationError("missing profile for publisher \"" + article.publisher_domain +
                              "\"");
    return *p;
}

std::set<std::string> distinct_countries(const EventGroup& event,
                                         const ProfileRegistry& registry) {
    std::set<std::string> countries;
    for (const NewsArticle& article : event.articles) {
        const PublisherProfile& p = publisher_or_throw(article, registry);
        if (p.country.empty())
            throw ValidationError("publisher \"" + p.domain + "\" has no country");
        countries.insert(fold_key(p.country));
    }
    return countries;
}

std::string join(const std::set<std::string>& values) {
    std::string out;
    for (const std::string& v : values) {
        if (!out.empty()) out += ",";
        out += v;
    }
    return out;
}

} // namespace

BinaryLabel label_geographical(const EventGroup& event, const ProfileRegistry& registry) {
    return distinct_countries(event, registry).size() <= 1 ? BinaryLabel::not_crossed
                                                           : BinaryLabel::crossed;
}

BinaryLabel label_linguistic(const EventGroup& event, const ProfileRegistry& registry) {
    std::set<std::string> languages;
    for (const NewsArticle& article : event.articles) {
        const PublisherProfile& p = publisher_or_throw(article, registry);
        if (p.publishing_language.empty())
            throw ValidationError("publisher \"" + p.domain + "\" has no publishing language");
        languages.insert(fold_key(p.publishing_language));
    }
    return languages.size() <= 1 ? BinaryLabel::not_crossed : BinaryLabel::crossed;
}

BinaryLabel label_political(const EventGroup& event, const ProfileRegistry& registry,
                            const LabelerOptions& options) {
    std::set<std::string> alignments;
    for (const NewsArticle& article : event.articles) {
        const PublisherProfile& p = publisher_or_throw(article, registry);
        if (!p.political_alignment)
            throw ValidationError("publisher \"" + p.domain + "\" has no political alignment");
        std::string value = fold_key(*p.political_alignment);
        if (options.alignment_synonyms)
            value = options.alignment_synonyms->canonical(value);
        alignments.insert(std::move(value));
    }
    return alignments.size() <= 1 ? BinaryLabel::not_crossed : BinaryLabel::crossed;
}

TernaryLabel aggregate_pair_labels(std::span<const TernaryLabel> labels) {
    TernaryLabel worst = TernaryLabel::information_not_crossing;
    for (TernaryLabel label : labels)
        worst = std::max(worst, label);
    return worst;
}

TernaryLabel label_ternary(const EventGroup& event, const ProfileRegistry& registry,
                           BarrierKind kind) {
    if (!is_ternary_barrier(kind))
        throw ContractViolation("label_ternary requires the cultural or economic barrier");
    const VectorKind vector_kind =
        kind == BarrierKind::cultural ? VectorKind::cultural : VectorKind::economic;

    const std::set<std::string> country_keys = distinct_countries(event, registry);
    std::vector<const CountryProfile*> profiles;
    profiles.reserve(country_keys.size());
    for (const std::string& key : country_keys) {
        const CountryProfile* country = registry.find_country(key);
        if (!country)
            throw ValidationError("country \"" + key + "\" not in registry");
        profiles.push_back(country);
    }

    std::vector<TernaryLabel> pair_labels;
    for (std::size_t i = 0; i < profiles.size(); ++i)
        for (std::size_t j = i + 1; j < profiles.size(); ++j) {
            const double d =
                normalized_distance(*profiles[i], *profiles[j], vector_kind, registry.bounds);
            pair_labels.push_back(pair_label(d));
        }
    return aggregate_pair_labels(pair_labels);
}

namespace {

// Annotates one event. Barriers whose metadata gaps remove every article get
// no label; other errors surface as exceptions for the caller to record.
EventAnnotation annotate_event(const EventGroup& group, const ProfileRegistry& registry,
                               const LabelerOptions& options) {
    EventAnnotation annotation;
    annotation.event_id = group.event_id;

    for (BarrierKind barrier : kAllBarriers) {
        EventGroup usable{group.event_id, {}};
        for (const NewsArticle& article : group.articles)
            if (!annotation_gap(article, registry, barrier)) usable.articles.push_back(article);
        if (usable.articles.empty()) continue;

        switch (barrier) {
        case BarrierKind::geographical:
            annotation.geographical = label_geographical(usable, registry);
            annotation.provenance[barrier] =
                "countries=" + join(distinct_countries(usable, registry));
            break;
        case BarrierKind::linguistic: {
            annotation.linguistic = label_linguistic(usable, registry);
            std::set<std::string> languages;
            for (const NewsArticle& a : usable.articles)
                languages.insert(fold_key(
                    registry.find_publisher(a.publisher_domain)->publishing_language));
            annotation.provenance[barrier] = "languages=" + join(languages);
            break;
        }
        case BarrierKind::political: {
            annotation.political = label_political(usable, registry, options);
            std::set<std::string> alignments;
            for (const NewsArticle& a : usable.articles)
                alignments.insert(
                    fold_key(*registry.find_publisher(a.publisher_domain)->political_alignment));
            annotation.provenance[barrier] = "alignments=" + join(alignments);
            break;
        }
        case BarrierKind::cultural:
        case BarrierKind::economic: {
            const TernaryLabel label = label_ternary(usable, registry, barrier);
            if (barrier == BarrierKind::cultural)
                annotation.cultural = label;
            else
                annotation.economic = label;
            annotation.provenance[barrier] =
                "countries=" + join(distinct_countries(usable, registry));
            break;
        }
        }
    }
    return annotation;
}

AnnotateResult run_annotation(const std::vector<EventGroup>& groups,
                              const ProfileRegistry& registry, const LabelerOptions& options,
                              bool parallel) {
    std::vector<EventAnnotation> annotations(groups.size());
    std::vector<std::string> errors(groups.size());

    const std::int64_t n = static_cast<std::int64_t>(groups.size());
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            annotations[i] = annotate_event(groups[i], registry, options);
        } catch (const std::exception& e) {
            annotations[i].event_id = groups[i].event_id;
            errors[i] = e.what();
        }
    }

    AnnotateResult result;
    result.annotations = std::move(annotations);
    for (std::size_t i = 0; i < groups.size(); ++i)
        if (!errors[i].empty()) result.failures.push_back({groups[i].event_id, errors[i]});
    return result;
}

} // namespace

AnnotateResult annotate_corpus(const std::vector<EventGroup>& groups,
                               const ProfileRegistry& registry,
                               const LabelerOptions& options) {
    return run_annotation(groups, registry, options, true);
}

AnnotateResult annotate_corpus_serial(const std::vector<EventGroup>& groups,
                                      const ProfileRegistry& registry,
                                      const LabelerOptions& options) {
    return run_annotation(groups, registry, options, false);
}

bool EventAnnotation::has_label(BarrierKind kind) const {
    switch (kind) {
    case BarrierKind::cultural: return cultural.has_value();
    case BarrierKind::economic: return economic.has_value();
    case BarrierKind::political: return political.has_value();
    case BarrierKind::linguistic: return linguistic.has_value();
    case BarrierKind::geographical: return geographical.has_value();
    }
    return false;
}

std::optional<std::string> EventAnnotation::label_name(BarrierKind kind) const {
    switch (kind) {
    case BarrierKind::cultural:
        if (cultural) return std::string(ternary_label_name(*cultural));
        return std::nullopt;
    case BarrierKind::economic:
        if (economic) return std::string(ternary_label_name(*economic));
        return std::nullopt;
    case BarrierKind::political:
        if (political) return binary_label_name(*political, kind);
        return std::nullopt;
    case BarrierKind::linguistic:
        if (linguistic) return binary_label_name(*linguistic, kind);
        return std::nullopt;
    case BarrierKind::geographical:
        if (geographical) return binary_label_name(*geographical, kind);
        return std::nullopt;
    }
    return std::nullopt;
}

std::optional<std::size_t> EventAnnotation::label_id(BarrierKind kind) const {
    switch (kind) {
    case BarrierKind::cultural:
        if (cultural) return static_cast<std::size_t>(*cultural);
        return std::nullopt;
    case BarrierKind::economic:
        if (economic) return static_cast<std::size_t>(*economic);
        return std::nullopt;
    case BarrierKind::political:
        if (political) return static_cast<std::size_t>(*political);
        return std::nullopt;
    case BarrierKind::linguistic:
        if (linguistic) return static_cast<std::size_t>(*linguistic);
        return std::nullopt;
    case BarrierKind::geographical:
        if (geographical) return static_cast<std::size_t>(*geographical);
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace barriers
