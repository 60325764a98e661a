#include "cgaudit/audit.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "cgaudit/text.h"

namespace cgaudit {

std::vector<MatchedPair> build_matched_set(const PopulationYear &population,
                                           const ProviderEstimates &estimates) {
    std::vector<MatchedPair> pairs;
    for (const auto &author : population.authors) {
        if (author.initials_only || author.given_token.empty()) continue;
        if (!author.effective.known()) continue;
        const std::string key = fold_name(author.given_token);

        MatchedPair pair;
        for (const auto &[provider, by_name] : estimates) {
            auto it = by_name.find(key);
            if (it == by_name.end() || !it->second.known()) continue;
            pair.provider_p_female.emplace(provider, it->second.p_female());
        }
        if (pair.provider_p_female.empty()) continue;
        pair.person_key = author.person_key;
        pair.raw_name = author.raw_name;
        pair.given_token = author.given_token;
        pair.truth_p_female = author.effective.p_female();
        pair.ground_truth = author.ground_truth;
        pair.truth_evidence = author.truth_evidence;
        pairs.push_back(std::move(pair));
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const MatchedPair &a, const MatchedPair &b) { return a.person_key < b.person_key; });
    return pairs;
}

TypeOneReport detect_type_one(std::span<const MatchedPair> pairs, double threshold) {
    TypeOneReport report;
    std::vector<double> flagged_values;
    for (const auto &pair : pairs) {
        if (pair.ground_truth != TruthLabel::Female) continue;
        double lowest = 1.0;
        for (const auto &[provider, value] : pair.provider_p_female) lowest = std::min(lowest, value);
        if (lowest >= threshold) continue;

        TypeOneFlag flag;
        flag.person_key = pair.person_key;
        flag.raw_name = pair.raw_name;
        flag.evidence = pair.truth_evidence;
        flag.truth_p_female = pair.truth_p_female;
        flag.provider_values = pair.provider_p_female;
        flag.severity = pair.truth_p_female - lowest;
        for (const auto &[provider, value] : pair.provider_p_female) flagged_values.push_back(value);
        report.flags.push_back(std::move(flag));
    }
    std::sort(report.flags.begin(), report.flags.end(),
              [](const TypeOneFlag &a, const TypeOneFlag &b) {
                  if (a.severity != b.severity) return a.severity > b.severity;
                  return a.person_key < b.person_key;
              });
    if (!flagged_values.empty()) report.median_flagged_p_female = median(std::move(flagged_values));
    return report;
}

TypeTwoRatio compute_type_two(std::span<const MatchedPair> pairs, std::string_view provider,
                              int year) {
    TypeTwoRatio out;
    out.year = year;
    out.provider = std::string(provider);
    for (const auto &pair : pairs) {
        auto it = pair.provider_p_female.find(provider);
        if (it == pair.provider_p_female.end()) continue;
        ++out.matched_n;
        out.truth_aggregate += pair.truth_p_female;
        out.provider_aggregate += it->second;
    }
    if (out.truth_aggregate > 0.0) out.ratio = out.provider_aggregate / out.truth_aggregate;
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return (values[mid - 1] + values[mid]) / 2.0;
}

namespace {

RatioStats stats_of(std::vector<double> values) {
    RatioStats stats;
    stats.count = values.size();
    stats.mean = std::accumulate(values.begin(), values.end(), 0.0) /
                 static_cast<double>(values.size());
    stats.median = median(std::move(values));
    return stats;
}

}  // namespace

RatioSummary summarize_ratios(std::span<const TypeTwoRatio> ratios) {
    RatioSummary summary;
    std::vector<double> all;
    std::map<std::string, std::vector<double>, std::less<>> by_provider;
    for (const auto &ratio : ratios) {
        if (!ratio.ratio) {
            ++summary.undefined_count;
            continue;
        }
        all.push_back(*ratio.ratio);
        by_provider[ratio.provider].push_back(*ratio.ratio);
    }
    if (all.empty()) throw std::invalid_argument("no defined ratio to summarize");
    summary.defined_count = all.size();
    const RatioStats overall = stats_of(std::move(all));
    summary.median = overall.median;
    summary.mean = overall.mean;
    for (auto &[provider, values] : by_provider) {
        summary.per_provider.emplace(provider, stats_of(std::move(values)));
    }
    return summary;
}

}  // namespace cgaudit
