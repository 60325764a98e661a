#include "cgaudit/trend.h"

#include <algorithm>
#include <stdexcept>

namespace cgaudit {

TrendFit fit_trendline(std::span<const TrendPoint> points, bool weight_by_articles) {
    if (points.size() < 2) throw std::invalid_argument("trendline needs at least two points");

    auto weight = [&](const TrendPoint &p) {
        return weight_by_articles ? static_cast<double>(p.article_count) : 1.0;
    };
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (const auto &p : points) {
        const double w = weight(p);
        sw += w;
        sx += w * p.year;
        sy += w * p.women_pct;
    }
    if (!(sw > 0.0)) throw std::invalid_argument("trendline weights sum to zero");
    const double mx = sx / sw;
    const double my = sy / sw;

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto &p : points) {
        const double w = weight(p);
        const double dx = p.year - mx;
        const double dy = p.women_pct - my;
        sxx += w * dx * dx;
        sxy += w * dx * dy;
        syy += w * dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("trendline needs at least two distinct years");

    TrendFit fit;
    fit.weighted = weight_by_articles;
    fit.points.assign(points.begin(), points.end());
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy == 0.0) {
        fit.degenerate = true;
        fit.r_squared = 0.0;
    } else {
        fit.r_squared = (sxy * sxy) / (sxx * syy);
    }
    return fit;
}

TrendPoint composite_point(std::span<const YearTotals> years, CompositePlacement placement) {
    if (years.empty()) throw std::invalid_argument("composite point needs at least one year");
    double women = 0.0;
    double weighted_year = 0.0;
    std::uint64_t population = 0;
    std::uint64_t articles = 0;
    int lo = years.front().year;
    int hi = lo;
    for (const auto &y : years) {
        women += y.expected_women;
        population += y.population;
        articles += y.article_count;
        weighted_year += static_cast<double>(y.year) * static_cast<double>(y.article_count);
        lo = std::min(lo, y.year);
        hi = std::max(hi, y.year);
    }
    if (population == 0) throw std::invalid_argument("composite point over an empty population");

    TrendPoint point;
    point.women_pct = 100.0 * women / static_cast<double>(population);
    point.article_count = articles;
    if (placement == CompositePlacement::ArticleWeighted && articles > 0) {
        point.year = weighted_year / static_cast<double>(articles);
    } else {
        point.year = (lo + hi) / 2.0;
    }
    return point;
}

}  // namespace cgaudit
