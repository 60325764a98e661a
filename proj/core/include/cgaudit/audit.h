#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cgaudit/estimate.h"
#include "cgaudit/population.h"

namespace cgaudit {

/// Provider id -> folded given name -> estimate.
using ProviderEstimates =
    std::map<std::string, std::unordered_map<std::string, GenderEstimate>, std::less<>>;

/// One person with a reference p(F) and at least one provider p(F).
struct MatchedPair {
    std::string person_key;
    std::string raw_name;
    std::string given_token;
    double truth_p_female = 0.0;
    /// Set when the reference value is a personal identification.
    std::optional<TruthLabel> ground_truth;
    std::optional<std::string> truth_evidence;
    std::map<std::string, double, std::less<>> provider_p_female;
};

/// Pairs every member of a resolved population with the provider answers for
/// their given name. Initials-only members and members with neither a
/// personal identification nor a name-model entry are left out; fractional
/// p(F) values never are. Sorted by person_key.
std::vector<MatchedPair> build_matched_set(const PopulationYear &population,
                                           const ProviderEstimates &estimates);

inline constexpr double kDefaultTypeOneThreshold = 0.9;

struct TypeOneFlag {
    std::string person_key;
    std::string raw_name;
    std::optional<std::string> evidence;
    double truth_p_female = 0.0;
    std::map<std::string, double, std::less<>> provider_values;
    /// truth_p_female minus the lowest provider value.
    double severity = 0.0;
};

struct TypeOneReport {
    /// Sorted by severity descending, then person_key.
    std::vector<TypeOneFlag> flags;
    /// Median of every provider value of every flagged woman.
    std::optional<double> median_flagged_p_female;
};

/// Flags each ground-truth woman for whom some provider returns p(F) below
/// `threshold`.
TypeOneReport detect_type_one(std::span<const MatchedPair> pairs,
                              double threshold = kDefaultTypeOneThreshold);

struct TypeTwoRatio {
    int year = 0;
    std::string provider;
    /// provider_aggregate / truth_aggregate; nullopt when truth_aggregate is 0.
    std::optional<double> ratio;
    std::size_t matched_n = 0;
    double truth_aggregate = 0.0;
    double provider_aggregate = 0.0;
};

/// Aggregate over the pairs that carry a value for `provider`; both sums run
/// over exactly that set.
TypeTwoRatio compute_type_two(std::span<const MatchedPair> pairs, std::string_view provider,
                              int year = 0);

struct RatioStats {
    double median = 0.0;
    double mean = 0.0;
    std::size_t count = 0;
};

struct RatioSummary {
    double median = 0.0;
    double mean = 0.0;
    std::size_t defined_count = 0;
    std::size_t undefined_count = 0;
    std::map<std::string, RatioStats, std::less<>> per_provider;
};

/// Median and mean over all defined ratios. Throws std::invalid_argument when
/// no ratio is defined.
RatioSummary summarize_ratios(std::span<const TypeTwoRatio> ratios);

/// Median of a non-empty sample (mean of the middle two for even sizes).
double median(std::vector<double> values);

}  // namespace cgaudit
