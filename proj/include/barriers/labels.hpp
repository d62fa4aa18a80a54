#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace barriers {

enum class BarrierKind { cultural, economic, political, linguistic, geographical };

inline constexpr std::array<BarrierKind, 5> kAllBarriers = {
    BarrierKind::cultural, BarrierKind::economic, BarrierKind::political,
    BarrierKind::linguistic, BarrierKind::geographical};

std::string_view barrier_name(BarrierKind kind);
std::optional<BarrierKind> parse_barrier(std::string_view name);

// Ternary labels for the cultural and economic barriers. The order encodes
// severity: not-crossing < unsure < crossing.
enum class TernaryLabel { information_not_crossing = 0, unsure = 1, information_crossing = 2 };

// Binary labels for the political, linguistic, and geographical barriers.
enum class BinaryLabel { not_crossed = 0, crossed = 1 };

std::string_view ternary_label_name(TernaryLabel label);

// Renders with the barrier suffix the dataset uses: Not-crossed-GB,
// Crossed-PB, Not-crossed-LB, ...
std::string binary_label_name(BinaryLabel label, BarrierKind kind);

std::optional<TernaryLabel> parse_ternary_label(std::string_view name);
std::optional<BinaryLabel> parse_binary_label(std::string_view name, BarrierKind kind);

inline bool is_ternary_barrier(BarrierKind kind) {
    return kind == BarrierKind::cultural || kind == BarrierKind::economic;
}

} // namespace barriers
