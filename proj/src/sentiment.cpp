#include "barriers/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace barriers {

namespace {

double parse_value(const std::string& cell, const std::string& path, std::size_t line_no) {
    const std::string t = trim(cell);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
        throw ValidationError(path + " line " + std::to_string(line_no) +
                              ": non-numeric value \"" + cell + "\"");
    return v;
}

} // namespace

ValenceLexicon load_lexicon(const std::string& lexicon_path, const std::string& negator_path,
                            const std::string& booster_path) {
    ValenceLexicon lexicon;

    std::size_t line_no = 0;
    for (const std::string& line : read_lines(lexicon_path)) {
        ++line_no;
        if (trim(line).empty() || line[0] == '#') continue;
        const auto cells = split(line, '\t');
        if (cells.size() < 2)
            throw ValidationError(lexicon_path + " line " + std::to_string(line_no) +
                                  ": expected token <TAB> valence");
        const double valence = parse_value(cells[1], lexicon_path, line_no);
        if (valence < -4.0 || valence > 4.0)
            throw ValidationError(lexicon_path + " line " + std::to_string(line_no) +
                                  ": valence outside [-4, 4]");
        lexicon.valences[fold_key(cells[0])] = valence;
    }
    if (lexicon.valences.empty())
        throw ValidationError("lexicon is empty: " + lexicon_path);

    line_no = 0;
    for (const std::string& line : read_lines(negator_path)) {
        ++line_no;
        const std::string token = fold_key(line);
        if (token.empty() || token[0] == '#') continue;
        lexicon.negators.insert(token);
    }

    line_no = 0;
    for (const std::string& line : read_lines(booster_path)) {
        ++line_no;
        if (trim(line).empty() || line[0] == '#') continue;
        const auto cells = split(line, '\t');
        if (cells.size() < 2)
            throw ValidationError(booster_path + " line " + std::to_string(line_no) +
                                  ": expected token <TAB> increment");
        lexicon.boosters[fold_key(cells[0])] = parse_value(cells[1], booster_path, line_no);
    }
    return lexicon;
}

namespace {

// Case-folded tokens split at whitespace and punctuation.
std::vector<std::string> sentiment_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) {
            current += static_cast<char>(std::tolower(uc));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

} // namespace

double compound_score(std::string_view text, const ValenceLexicon& lexicon,
                      const SentimentConfig& config) {
    const std::vector<std::string> tokens = sentiment_tokens(text);

    double sum = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto hit = lexicon.valences.find(tokens[i]);
        if (hit == lexicon.valences.end()) continue;
        const double valence = hit->second;
        if (valence == 0.0) continue;

        double contribution = valence;
        bool negated = false;
        const std::size_t window =
            std::min<std::size_t>(i, static_cast<std::size_t>(config.context_window));
        for (std::size_t back = 1; back <= window; ++back) {
            const std::string& prev = tokens[i - back];
            const auto booster = lexicon.boosters.find(prev);
            if (booster != lexicon.boosters.end())
                contribution += (valence > 0.0 ? 1.0 : -1.0) * booster->second;
            if (lexicon.negators.count(prev)) negated = true;
        }
        // Dampeners pull the contribution toward zero but never across it,
        // keeping the score monotone in appended same-sign tokens.
        if (valence > 0.0)
            contribution = std::max(0.0, contribution);
        else
            contribution = std::min(0.0, contribution);
        if (negated) contribution *= config.negation_factor;
        sum += contribution;
    }

    if (sum == 0.0) return 0.0;
    return sum / std::sqrt(sum * sum + config.alpha);
}

Polarity classify(double compound, const SentimentConfig& config) {
    if (compound < -1.0 || compound > 1.0)
        throw ContractViolation("classify: compound " + format_double(compound) +
                                " outside [-1, 1]");
    if (compound >= config.positive_threshold) return Polarity::positive;
    if (compound <= config.negative_threshold) return Polarity::negative;
    return Polarity::neutral;
}

std::string_view polarity_name(Polarity p) {
    switch (p) {
    case Polarity::negative: return "negative";
    case Polarity::neutral: return "neutral";
    case Polarity::positive: return "positive";
    }
    return "";
}

std::optional<Polarity> parse_polarity(std::string_view name) {
    if (name == "negative") return Polarity::negative;
    if (name == "neutral") return Polarity::neutral;
    if (name == "positive") return Polarity::positive;
    return std::nullopt;
}

SentimentScore score_text(std::string_view text, const ValenceLexicon& lexicon,
                          const SentimentConfig& config) {
    const double compound = compound_score(text, lexicon, config);
    return {compound, classify(compound, config)};
}

namespace {

std::vector<SentimentScore> run_scoring(std::span<const std::string> texts,
                                        const ValenceLexicon& lexicon,
                                        const SentimentConfig& config, bool parallel) {
    std::vector<SentimentScore> scores(texts.size());
    const std::int64_t n = static_cast<std::int64_t>(texts.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < n; ++i)
        scores[i] = score_text(texts[i], lexicon, config);
    return scores;
}

} // namespace

std::vector<SentimentScore> score_texts(std::span<const std::string> texts,
                                        const ValenceLexicon& lexicon,
                                        const SentimentConfig& config) {
    return run_scoring(texts, lexicon, config, true);
}

std::vector<SentimentScore> score_texts_serial(std::span<const std::string> texts,
                                               const ValenceLexicon& lexicon,
                                               const SentimentConfig& config) {
    return run_scoring(texts, lexicon, config, false);
}

ClassSentimentDistribution distribution(std::span<const SentimentScore> scores,
                                        const GroupKey& key) {
    if (scores.empty()) throw ValidationError("empty group: " + key.barrier + "/" +
                                              key.category + "/" + key.label);
    ClassSentimentDistribution dist;
    dist.key = key;
    for (const SentimentScore& score : scores) {
        switch (score.polarity) {
        case Polarity::positive: ++dist.n_positive; break;
        case Polarity::neutral: ++dist.n_neutral; break;
        case Polarity::negative: ++dist.n_negative; break;
        }
    }
    const double total = static_cast<double>(dist.total());
    dist.pos_pct = 100.0 * static_cast<double>(dist.n_positive) / total;
    dist.neu_pct = 100.0 * static_cast<double>(dist.n_neutral) / total;
    dist.neg_pct = 100.0 * static_cast<double>(dist.n_negative) / total;
    return dist;
}

TrendType detect_trend(double pos_pct, double neu_pct, double neg_pct,
                       double tie_tolerance) {
    if (pos_pct > neu_pct && neu_pct > neg_pct) return TrendType::trend1;
    if (neg_pct > neu_pct && neu_pct > pos_pct) return TrendType::trend4;
    if (neu_pct > std::max(pos_pct, neg_pct) &&
        std::abs(pos_pct - neg_pct) <= tie_tolerance)
        return TrendType::trend2;
    if (neu_pct < std::min(pos_pct, neg_pct)) return TrendType::trend3;
    return TrendType::none;
}

std::string_view trend_name(TrendType t) {
    switch (t) {
    case TrendType::trend1: return "trend1";
    case TrendType::trend2: return "trend2";
    case TrendType::trend3: return "trend3";
    case TrendType::trend4: return "trend4";
    case TrendType::none: return "none";
    }
    return "";
}

std::array<std::size_t, kHistogramBins> compound_histogram(std::span<const double> compounds) {
    std::array<std::size_t, kHistogramBins> bins{};
    for (double c : compounds) {
        const double clamped = std::clamp(c, -1.0, 1.0);
        auto bin = static_cast<std::size_t>((clamped + 1.0) / 2.0 * kHistogramBins);
        if (bin >= kHistogramBins) bin = kHistogramBins - 1;
        ++bins[bin];
    }
    return bins;
}

} // namespace barriers
