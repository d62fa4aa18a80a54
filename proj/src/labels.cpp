#include "barriers/labels.hpp"

namespace barriers {

std::string_view barrier_name(BarrierKind kind) {
    switch (kind) {
    case BarrierKind::cultural: return "cultural";
    case BarrierKind::economic: return "economic";
    case BarrierKind::political: return "political";
    case BarrierKind::linguistic: return "linguistic";
    case BarrierKind::geographical: return "geographical";
    }
    return "";
}

std::optional<BarrierKind> parse_barrier(std::string_view name) {
    for (BarrierKind kind : kAllBarriers)
        if (name == barrier_name(kind)) return kind;
    if (name == "geographic") return BarrierKind::geographical;
    return std::nullopt;
}

std::string_view ternary_label_name(TernaryLabel label) {
    switch (label) {
    case TernaryLabel::information_not_crossing: return "information-not-crossing";
    case TernaryLabel::unsure: return "unsure";
    case TernaryLabel::information_crossing: return "information-crossing";
    }
    return "";
}

namespace {

std::string_view barrier_suffix(BarrierKind kind) {
    switch (kind) {
    case BarrierKind::political: return "PB";
    case BarrierKind::linguistic: return "LB";
    case BarrierKind::geographical: return "GB";
    default: return "";
    }
}

} // namespace

std::string binary_label_name(BinaryLabel label, BarrierKind kind) {
    std::string base = label == BinaryLabel::crossed ? "Crossed" : "Not-crossed";
    const std::string_view suffix = barrier_suffix(kind);
    if (!suffix.empty()) {
        base += '-';
        base += suffix;
    }
    return base;
}

std::optional<TernaryLabel> parse_ternary_label(std::string_view name) {
    if (name == "information-not-crossing") return TernaryLabel::information_not_crossing;
    if (name == "unsure") return TernaryLabel::unsure;
    if (name == "information-crossing") return TernaryLabel::information_crossing;
    return std::nullopt;
}

std::optional<BinaryLabel> parse_binary_label(std::string_view name, BarrierKind kind) {
    if (name == binary_label_name(BinaryLabel::not_crossed, kind)) return BinaryLabel::not_crossed;
    if (name == binary_label_name(BinaryLabel::crossed, kind)) return BinaryLabel::crossed;
    return std::nullopt;
}

} // namespace barriers
