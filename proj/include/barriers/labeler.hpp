#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "barriers/corpus.hpp"
#include "barriers/labels.hpp"
#include "barriers/profiles.hpp"

namespace barriers {

// Optional mapping of alignment strings onto coarser classes, for callers who
// want e.g. "conservatism" and "centre-right" treated as the same camp.
// Unmapped alignments compare as themselves.
struct AlignmentSynonyms {
    std::map<std::string, std::string> classes; // folded alignment -> class
    std::string canonical(std::string_view alignment) const;
};

AlignmentSynonyms load_alignment_synonyms(const std::string& path);

struct LabelerOptions {
    std::optional<AlignmentSynonyms> alignment_synonyms;
};

BinaryLabel label_geographical(const EventGroup& event, const ProfileRegistry& registry);
BinaryLabel label_linguistic(const EventGroup& event, const ProfileRegistry& registry);
BinaryLabel label_political(const EventGroup& event, const ProfileRegistry& registry,
                            const LabelerOptions& options = {});

// Pairwise labels over the distinct publisher countries of the event,
// aggregated by severity. A single distinct country is not-crossing.
TernaryLabel label_ternary(const EventGroup& event, const ProfileRegistry& registry,
                           BarrierKind kind);

// Max under the order not-crossing < unsure < crossing; not-crossing when empty.
TernaryLabel aggregate_pair_labels(std::span<const TernaryLabel> labels);

struct EventAnnotation {
    std::string event_id;
    std::optional<TernaryLabel> cultural;
    std::optional<TernaryLabel> economic;
    std::optional<BinaryLabel> political;
    std::optional<BinaryLabel> linguistic;
    std::optional<BinaryLabel> geographical;
    std::map<BarrierKind, std::string> provenance; // attribute values behind each label

    bool has_label(BarrierKind kind) const;
    // Rendered label name, e.g. "Crossed-GB" or "unsure".
    std::optional<std::string> label_name(BarrierKind kind) const;
    // Canonical id: binary {not-crossed: 0, crossed: 1},
    // ternary {not-crossing: 0, unsure: 1, crossing: 2}.
    std::optional<std::size_t> label_id(BarrierKind kind) const;
};

struct AnnotationFailure {
    std::string event_id;
    std::string message;
};

struct AnnotateResult {
    std::vector<EventAnnotation> annotations; // one per input group, same order
    std::vector<AnnotationFailure> failures;
};

// Labels every barrier whose metadata survives per-barrier filtering; barriers
// with no annotatable article stay unlabeled. Per-event errors are collected,
// not thrown. The parallel kernel and the serial reference produce identical
// results.
AnnotateResult annotate_corpus(const std::vector<EventGroup>& groups,
                               const ProfileRegistry& registry,
                               const LabelerOptions& options = {});
AnnotateResult annotate_corpus_serial(const std::vector<EventGroup>& groups,
                                      const ProfileRegistry& registry,
                                      const LabelerOptions& options = {});

} // namespace barriers
