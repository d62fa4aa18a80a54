#include "barriers/profiles.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace barriers {

std::string_view vector_kind_name(VectorKind kind) {
    return kind == VectorKind::cultural ? "cultural" : "economic";
}

const PublisherProfile* ProfileRegistry::find_publisher(std::string_view domain) const {
    const auto it = publishers.find(fold_key(domain));
    return it == publishers.end() ? nullptr : &it->second;
}

const CountryProfile* ProfileRegistry::find_country(std::string_view country) const {
    const auto it = countries.find(fold_key(country));
    return it == countries.end() ? nullptr : &it->second;
}

namespace {

bool parse_number(const std::string& cell, double& out) {
    const std::string t = trim(cell);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

// Reads `n` cells as one profile vector. All-empty means the vector is absent;
// anything partial or out of range is a rejection.
template <std::size_t N>
bool parse_vector(const std::vector<std::string>& cells, std::size_t offset,
                  std::optional<std::array<double, N>>& out, std::string& error) {
    std::size_t present = 0;
    std::array<double, N> values{};
    for (std::size_t i = 0; i < N; ++i) {
        const std::string cell = offset + i < cells.size() ? trim(cells[offset + i]) : "";
        if (cell.empty()) continue;
        double v;
        if (!parse_number(cell, v)) {
            error = "non-numeric dimension value \"" + cell + "\"";
            return false;
        }
        if (v < 0.0 || v > 100.0) {
            error = "dimension value " + format_double(v) + " outside [0, 100]";
            return false;
        }
        values[i] = v;
        ++present;
    }
    if (present == 0) {
        out.reset();
        return true;
    }
    if (present != N) {
        error = "expected " + std::to_string(N) + " dimensions, got " + std::to_string(present);
        return false;
    }
    out = values;
    return true;
}

template <std::size_t N>
void fold_bounds(const std::optional<std::array<double, N>>& vec,
                 std::array<DimensionBound, N>& bounds, std::size_t& count) {
    if (!vec) return;
    for (std::size_t i = 0; i < N; ++i) {
        if (count == 0) {
            bounds[i] = {(*vec)[i], (*vec)[i]};
        } else {
            bounds[i].min = std::min(bounds[i].min, (*vec)[i]);
            bounds[i].max = std::max(bounds[i].max, (*vec)[i]);
        }
    }
    ++count;
}

} // namespace

RegistryLoadResult load_registry(const std::string& publisher_path,
                                 const std::string& country_path) {
    RegistryLoadResult result;
    ProfileRegistry& reg = result.registry;

    std::size_t line_no = 0;
    for (const std::string& line : read_lines(publisher_path)) {
        ++line_no;
        if (trim(line).empty() || line[0] == '#') continue;
        const auto cells = split(line, '\t');
        if (cells.size() < 3) {
            result.publisher_rejections.push_back(
                {line_no, "expected at least 3 fields (domain, country, language)"});
            continue;
        }
        PublisherProfile profile;
        profile.domain = fold_key(cells[0]);
        profile.country = trim(cells[1]);
        profile.publishing_language = trim(cells[2]);
        if (cells.size() > 3 && !trim(cells[3]).empty())
            profile.political_alignment = trim(cells[3]);
        if (profile.domain.empty()) {
            result.publisher_rejections.push_back({line_no, "empty domain"});
            continue;
        }
        if (profile.country.empty()) {
            result.publisher_rejections.push_back({line_no, "empty country"});
            continue;
        }
        if (reg.publishers.count(profile.domain))
            throw ValidationError("duplicate publisher domain \"" + profile.domain +
                                  "\" at line " + std::to_string(line_no));
        reg.publishers.emplace(profile.domain, std::move(profile));
    }

    line_no = 0;
    for (const std::string& line : read_lines(country_path)) {
        ++line_no;
        if (trim(line).empty() || line[0] == '#') continue;
        const auto cells = split(line, '\t');
        CountryProfile profile;
        profile.country = trim(cells[0]);
        if (profile.country.empty()) {
            result.country_rejections.push_back({line_no, "empty country name"});
            continue;
        }
        std::string error;
        if (!parse_vector<kCulturalDims>(cells, 1, profile.cultural, error)) {
            result.country_rejections.push_back({line_no, "cultural vector: " + error});
            continue;
        }
        if (!parse_vector<kEconomicDims>(cells, 1 + kCulturalDims, profile.economic, error)) {
            result.country_rejections.push_back({line_no, "economic vector: " + error});
            continue;
        }
        const std::size_t lat_idx = 1 + kCulturalDims + kEconomicDims;
        double v;
        if (lat_idx < cells.size() && parse_number(cells[lat_idx], v)) profile.latitude = v;
        if (lat_idx + 1 < cells.size() && parse_number(cells[lat_idx + 1], v))
            profile.longitude = v;

        const std::string key = fold_key(profile.country);
        if (reg.countries.count(key))
            throw ValidationError("duplicate country \"" + profile.country + "\" at line " +
                                  std::to_string(line_no));
        reg.countries.emplace(key, std::move(profile));
    }

    for (const auto& [key, profile] : reg.countries) {
        fold_bounds(profile.cultural, reg.bounds.cultural, reg.bounds.cultural_count);
        fold_bounds(profile.economic, reg.bounds.economic, reg.bounds.economic_count);
    }
    return result;
}

namespace {

template <std::size_t N>
double scaled_distance(const std::array<double, N>& a, const std::array<double, N>& b,
                       const std::array<DimensionBound, N>& bounds) {
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double range = bounds[i].max - bounds[i].min;
        if (range <= 0.0) continue; // degenerate dimension
        const double sa = (a[i] - bounds[i].min) / range;
        const double sb = (b[i] - bounds[i].min) / range;
        sum_sq += (sa - sb) * (sa - sb);
    }
    return std::sqrt(sum_sq) / std::sqrt(static_cast<double>(N));
}

} // namespace

double normalized_distance(const CountryProfile& a, const CountryProfile& b,
                           VectorKind kind, const DimensionBounds& bounds) {
    if (kind == VectorKind::cultural) {
        if (!a.cultural)
            throw ValidationError("profile incomplete: country \"" + a.country +
                                  "\" has no cultural vector");
        if (!b.cultural)
            throw ValidationError("profile incomplete: country \"" + b.country +
                                  "\" has no cultural vector");
        return scaled_distance(*a.cultural, *b.cultural, bounds.cultural);
    }
    if (!a.economic)
        throw ValidationError("profile incomplete: country \"" + a.country +
                              "\" has no economic vector");
    if (!b.economic)
        throw ValidationError("profile incomplete: country \"" + b.country +
                              "\" has no economic vector");
    return scaled_distance(*a.economic, *b.economic, bounds.economic);
}

TernaryLabel pair_label(double distance) {
    if (!(distance >= 0.0) || distance > 1.0)
        throw ContractViolation("pair_label: distance " + format_double(distance) +
                                " outside [0, 1]");
    if (distance <= 0.1) return TernaryLabel::information_not_crossing;
    if (distance <= 0.4) return TernaryLabel::unsure;
    return TernaryLabel::information_crossing;
}

} // namespace barriers
