#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "barriers/common.hpp"

namespace barriers {

struct ValenceLexicon {
    std::unordered_map<std::string, double> valences; // token -> [-4, +4]
    std::unordered_set<std::string> negators;
    std::unordered_map<std::string, double> boosters; // token -> increment
};

// Lexicon file: token <TAB> valence per line. Negators: one token per line.
// Boosters: token <TAB> increment per line. '#' lines are comments.
ValenceLexicon load_lexicon(const std::string& lexicon_path,
                            const std::string& negator_path,
                            const std::string& booster_path);

struct SentimentConfig {
    double alpha = 15.0;             // normalization constant
    double negation_factor = -0.74;  // applied when a negator precedes a hit
    int context_window = 3;          // preceding tokens scanned for modifiers
    double positive_threshold = 0.05;
    double negative_threshold = -0.05;
};

enum class Polarity { negative = 0, neutral = 1, positive = 2 };

std::string_view polarity_name(Polarity p);
std::optional<Polarity> parse_polarity(std::string_view name);

// Sum of per-token valence contributions, squashed to (-1, 1) by
// s / sqrt(s^2 + alpha). Text with no lexicon hits scores exactly 0.
double compound_score(std::string_view text, const ValenceLexicon& lexicon,
                      const SentimentConfig& config = {});

Polarity classify(double compound, const SentimentConfig& config = {});

struct SentimentScore {
    double compound = 0.0;
    Polarity polarity = Polarity::neutral;
};

SentimentScore score_text(std::string_view text, const ValenceLexicon& lexicon,
                          const SentimentConfig& config = {});

// Batch kernels; the OpenMP version and the serial reference are
// interchangeable bit-for-bit.
std::vector<SentimentScore> score_texts(std::span<const std::string> texts,
                                        const ValenceLexicon& lexicon,
                                        const SentimentConfig& config = {});
std::vector<SentimentScore> score_texts_serial(std::span<const std::string> texts,
                                               const ValenceLexicon& lexicon,
                                               const SentimentConfig& config = {});

struct GroupKey {
    std::string barrier;
    std::string category;
    std::string label;
    auto operator<=>(const GroupKey&) const = default;
};

struct ClassSentimentDistribution {
    GroupKey key;
    std::size_t n_positive = 0;
    std::size_t n_neutral = 0;
    std::size_t n_negative = 0;
    double pos_pct = 0.0; // full precision; round only when reporting
    double neu_pct = 0.0;
    double neg_pct = 0.0;

    std::size_t total() const { return n_positive + n_neutral + n_negative; }
};

ClassSentimentDistribution distribution(std::span<const SentimentScore> scores,
                                        const GroupKey& key);

enum class TrendType { trend1, trend2, trend3, trend4, none };

std::string_view trend_name(TrendType t);

// trend1: pos > neu > neg. trend4: the reverse. trend2: neutral dominates and
// pos/neg are within the tie tolerance. trend3: neutral below both.
// Evaluated in the order trend1, trend4, trend2, trend3.
TrendType detect_trend(double pos_pct, double neu_pct, double neg_pct,
                       double tie_tolerance = 5.0);

// Uniform 20-bin histogram of compound scores over [-1, 1].
inline constexpr std::size_t kHistogramBins = 20;
std::array<std::size_t, kHistogramBins> compound_histogram(std::span<const double> compounds);

} // namespace barriers
