#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cgaudit {

struct TrendPoint {
    double year = 0.0;
    /// Percent of women in the population (0-100).
    double women_pct = 0.0;
    std::uint64_t article_count = 0;
};

struct TrendFit {
    double slope = 0.0;      ///< percent per year
    double intercept = 0.0;  ///< percent at year 0
    double r_squared = 0.0;
    /// True when every y is equal; r_squared is then reported as 0.
    bool degenerate = false;
    bool weighted = false;
    std::vector<TrendPoint> points;

    double predict(double year) const noexcept { return intercept + slope * year; }
};

/// Ordinary least squares of women_pct on year; with `weight_by_articles`
/// each point is weighted by its article count. R^2 = Sxy^2 / (Sxx Syy).
/// Throws std::invalid_argument for fewer than two points or when all years
/// are equal.
TrendFit fit_trendline(std::span<const TrendPoint> points, bool weight_by_articles = false);

enum class CompositePlacement { ArticleWeighted, Midpoint };

/// Collapses several yearly populations into one point: the women share of
/// the pooled population, positioned at the article-weighted mean year or the
/// midpoint of the year span.
struct YearTotals {
    int year = 0;
    double expected_women = 0.0;
    std::uint64_t population = 0;
    std::uint64_t article_count = 0;
};

TrendPoint composite_point(std::span<const YearTotals> years,
                           CompositePlacement placement = CompositePlacement::ArticleWeighted);

}  // namespace cgaudit
