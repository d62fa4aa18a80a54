#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "barriers/common.hpp"
#include "barriers/labels.hpp"

namespace barriers {

inline constexpr std::size_t kCulturalDims = 6;
inline constexpr std::size_t kEconomicDims = 12;

enum class VectorKind { cultural, economic };

std::string_view vector_kind_name(VectorKind kind);

struct PublisherProfile {
    std::string domain; // folded hostname, unique in the registry
    std::string country;
    std::string publishing_language;
    std::optional<std::string> political_alignment;
};

struct CountryProfile {
    std::string country;
    std::optional<std::array<double, kCulturalDims>> cultural; // raw 0-100
    std::optional<std::array<double, kEconomicDims>> economic; // raw 0-100
    std::optional<double> latitude;
    std::optional<double> longitude;
};

struct DimensionBound {
    double min = 0.0;
    double max = 0.0;
};

// Observed per-dimension min/max over the loaded countries, used to min-max
// scale raw values before taking distances.
struct DimensionBounds {
    std::array<DimensionBound, kCulturalDims> cultural{};
    std::array<DimensionBound, kEconomicDims> economic{};
    std::size_t cultural_count = 0; // countries that contributed a vector
    std::size_t economic_count = 0;
};

struct ProfileRegistry {
    std::map<std::string, PublisherProfile> publishers; // key: folded domain
    std::map<std::string, CountryProfile> countries;    // key: folded country
    DimensionBounds bounds;

    const PublisherProfile* find_publisher(std::string_view domain) const;
    const CountryProfile* find_country(std::string_view country) const;
};

struct RegistryLoadResult {
    ProfileRegistry registry;
    std::vector<Rejection> publisher_rejections;
    std::vector<Rejection> country_rejections;
};

// Publisher file: domain <TAB> country <TAB> publishing_language <TAB> political_alignment?
// Country file: country <TAB> 6 cultural <TAB> 12 economic <TAB> latitude? <TAB> longitude?
// Absent vectors are encoded as empty cells; lines starting with '#' are skipped.
RegistryLoadResult load_registry(const std::string& publisher_path,
                                 const std::string& country_path);

// Euclidean distance over min-max scaled dimensions, divided by sqrt(d) so the
// result lies in [0, 1]. A degenerate dimension (min == max) contributes zero.
double normalized_distance(const CountryProfile& a, const CountryProfile& b,
                           VectorKind kind, const DimensionBounds& bounds);

// The three-way threshold mapping on a distance score: not-crossing at <= 0.1,
// unsure up to and including 0.4, crossing above.
TernaryLabel pair_label(double distance);

} // namespace barriers
