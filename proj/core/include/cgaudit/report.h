#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cgaudit/audit.h"
#include "cgaudit/name_model.h"
#include "cgaudit/population.h"
#include "cgaudit/predictors.h"
#include "cgaudit/sampling.h"
#include "cgaudit/trend.h"

namespace cgaudit {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct YearRange {
    int first = 1950;
    int last = 1980;

    bool contains(int year) const noexcept { return year >= first && year <= last; }
    bool operator==(const YearRange &) const = default;
};

/// "1950-1980" or "1950". Throws ConfigError.
YearRange parse_year_range(std::string_view text);

/// Everything a pipeline stage needs. Paths are kept as given.
struct RunConfig {
    std::filesystem::path ssa_dir;
    std::filesystem::path model_file;
    std::filesystem::path corpus;
    std::filesystem::path labels;
    std::filesystem::path replay;
    std::filesystem::path record;
    std::filesystem::path cache;
    std::filesystem::path out = "out";

    int offset = kDefaultBirthYearOffset;
    int window = kDefaultLookupWindow;
    YearRange years;
    /// genderapi, namsor, genderize, local or all (the three remote services).
    std::string provider = "all";
    std::uint64_t seed = 1;
    bool strict = false;

    double type_one_threshold = kDefaultTypeOneThreshold;
    double z = 1.96;
    double margin = 0.05;
    double proportion = 0.5;
    /// Years whose full author population exceeds this are sampled.
    std::uint64_t sample_threshold = 300;
    TruthConstants truth;

    std::optional<YearRange> composite = YearRange{1950, 1953};
    CompositePlacement placement = CompositePlacement::ArticleWeighted;
    bool weighted_fit = false;

    double rate_limit = 1.0;
    unsigned concurrency = 1;

    int year_a = 1925;
    int year_b = 2000;
    std::uint64_t min_samples = kDefaultShiftMinSamples;
};

/// Result-affecting settings as sorted key/value pairs (output and cache
/// locations are excluded).
std::vector<std::pair<std::string, std::string>> canonical_entries(const RunConfig &config);

/// 16 hex digits of FNV-1a 64 over the canonical entries.
std::string config_hash(const RunConfig &config);

/// Providers selected by config.provider, in report order.
std::vector<Provider> selected_providers(const RunConfig &config);

/// Throws ConfigError when a referenced input path does not exist.
void require_existing(const std::filesystem::path &path, std::string_view what);

/// Report stamp written into every artifact.
struct ReportStamp {
    std::string config_hash;
    std::uint64_t seed = 0;
};

/// Per-year audit state as it ends up in the reports.
struct YearAudit {
    PopulationYear population;
    std::size_t corpus_articles = 0;
    std::size_t full_population = 0;
    bool sampled = false;
    std::optional<SamplePlan> plan;
    std::vector<MatchedPair> pairs;
    std::vector<TypeTwoRatio> ratios;
};

std::vector<std::string> population_table_header();

/// Writes one CSV row per year (table1/table2 layout).
void write_population_table(std::ostream &out, std::span<const YearAudit> years,
                            const ReportStamp &stamp);

void write_type_one_table(std::ostream &out, const TypeOneReport &report,
                          std::span<const std::string> providers, const ReportStamp &stamp);

void write_type_two_table(std::ostream &out, std::span<const YearAudit> years,
                          const ReportStamp &stamp);

void write_shifts_table(std::ostream &out, std::span<const GenderShiftRecord> shifts,
                        const ReportStamp &stamp);

void write_figure_csv(std::ostream &out, const TrendFit &fit, const ReportStamp &stamp);

struct FigureGeometry {
    double width = 720.0;
    double height = 480.0;
    /// Radius of a bubble for the largest article count.
    double max_radius = 36.0;
};

/// Bubble radius for `article_count` given the largest count in the plot;
/// area is proportional to article count.
double bubble_radius(std::uint64_t article_count, std::uint64_t max_count,
                     const FigureGeometry &geometry = {});

/// SVG 1.1 bubble scatter (x year, y women %, area proportional to articles)
/// with the fitted trendline and an R^2 annotation.
void write_figure_svg(std::ostream &out, const TrendFit &fit, const ReportStamp &stamp,
                      const FigureGeometry &geometry = {});

/// Formats with fixed decimals and no locale influence.
std::string format_fixed(double value, int decimals);

}  // namespace cgaudit
