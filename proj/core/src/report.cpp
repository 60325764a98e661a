#include "cgaudit/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>

#include "cgaudit/csv.h"

namespace cgaudit {

namespace {

std::string num(double value) { return fmt::format("{}", value); }

std::string num(std::uint64_t value) { return std::to_string(value); }

std::optional<int> parse_int(std::string_view text) {
    int value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
    return value;
}

std::string range_text(const YearRange &range) {
    return fmt::format("{}-{}", range.first, range.last);
}

}  // namespace

YearRange parse_year_range(std::string_view text) {
    const auto dash = text.find('-');
    const auto first = parse_int(text.substr(0, dash));
    const auto last = dash == std::string_view::npos ? first : parse_int(text.substr(dash + 1));
    if (!first || !last) throw ConfigError("bad year range '" + std::string(text) + "'");
    if (*first > *last) {
        throw ConfigError("year range '" + std::string(text) + "' runs backwards");
    }
    return YearRange{*first, *last};
}

std::vector<std::pair<std::string, std::string>> canonical_entries(const RunConfig &config) {
    std::vector<std::pair<std::string, std::string>> entries = {
        {"composite", config.composite ? range_text(*config.composite) : "none"},
        {"corpus", config.corpus.generic_string()},
        {"labels", config.labels.generic_string()},
        {"margin", num(config.margin)},
        {"min_samples", num(config.min_samples)},
        {"model_file", config.model_file.generic_string()},
        {"offset", std::to_string(config.offset)},
        {"placement",
         config.placement == CompositePlacement::Midpoint ? "midpoint" : "article-weighted"},
        {"proportion", num(config.proportion)},
        {"provider", config.provider},
        {"replay", config.replay.generic_string()},
        {"sample_threshold", num(config.sample_threshold)},
        {"seed", num(config.seed)},
        {"ssa_dir", config.ssa_dir.generic_string()},
        {"strict", config.strict ? "true" : "false"},
        {"truth_female", num(config.truth.female)},
        {"truth_male", num(config.truth.male)},
        {"type_one_threshold", num(config.type_one_threshold)},
        {"weighted_fit", config.weighted_fit ? "true" : "false"},
        {"window", std::to_string(config.window)},
        {"year_a", std::to_string(config.year_a)},
        {"year_b", std::to_string(config.year_b)},
        {"years", range_text(config.years)},
        {"z", num(config.z)},
    };
    std::sort(entries.begin(), entries.end());
    return entries;
}

std::string config_hash(const RunConfig &config) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto feed = [&](std::string_view text) {
        for (unsigned char c : text) {
            hash ^= c;
            hash *= 0x100000001b3ULL;
        }
    };
    for (const auto &[key, value] : canonical_entries(config)) {
        feed(key);
        feed("=");
        feed(value);
        feed("\n");
    }
    return fmt::format("{:016x}", hash);
}

std::vector<Provider> selected_providers(const RunConfig &config) {
    if (config.provider == "all") return remote_providers();
    auto provider = parse_provider(config.provider);
    if (!provider) throw ConfigError("unknown provider '" + config.provider + "'");
    return {*provider};
}

void require_existing(const std::filesystem::path &path, std::string_view what) {
    if (path.empty()) throw ConfigError(std::string(what) + " path is not set");
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) {
        throw ConfigError(std::string(what) + " not found: " + path.string());
    }
}

// ---------------------------------------------------------------------------
// CSV tables

std::vector<std::string> population_table_header() {
    return {"config_hash",  "seed",           "year",          "articles",
            "corpus_articles", "population",  "full_population", "mentions",
            "labeled",      "identified_fraction", "unknown",  "expected_women",
            "women_pct",    "sampled",        "sample_size"};
}

void write_population_table(std::ostream &out, std::span<const YearAudit> years,
                            const ReportStamp &stamp) {
    csv::write_row(out, population_table_header());
    for (const auto &y : years) {
        const auto &pop = y.population;
        const auto unknown = std::count_if(pop.authors.begin(), pop.authors.end(),
                                           [](const AuthorRecord &a) { return !a.effective.known(); });
        csv::write_row(out, {stamp.config_hash, num(stamp.seed), std::to_string(pop.year),
                             num(static_cast<std::uint64_t>(pop.article_count)),
                             num(static_cast<std::uint64_t>(y.corpus_articles)),
                             num(static_cast<std::uint64_t>(pop.authors.size())),
                             num(static_cast<std::uint64_t>(y.full_population)),
                             num(static_cast<std::uint64_t>(pop.mention_count)),
                             num(static_cast<std::uint64_t>(pop.labeled_count())),
                             num(pop.identified_fraction), num(static_cast<std::uint64_t>(unknown)),
                             num(pop.expected_women), num(100.0 * pop.women_pct),
                             y.sampled ? "true" : "false",
                             y.plan ? num(y.plan->sample_size) : std::string()});
    }
}

void write_type_one_table(std::ostream &out, const TypeOneReport &report,
                          std::span<const std::string> providers, const ReportStamp &stamp) {
    std::vector<std::string> header = {"config_hash", "seed", "person_key", "raw_name",
                                       "evidence", "truth_p_female"};
    for (const auto &p : providers) header.push_back(p);
    header.push_back("min_p_female");
    header.push_back("severity");
    csv::write_row(out, header);

    for (const auto &flag : report.flags) {
        std::vector<std::string> row = {stamp.config_hash, num(stamp.seed), flag.person_key,
                                        flag.raw_name, flag.evidence.value_or(""),
                                        num(flag.truth_p_female)};
        double lowest = 1.0;
        for (const auto &p : providers) {
            auto it = flag.provider_values.find(p);
            if (it == flag.provider_values.end()) {
                row.emplace_back();
            } else {
                row.push_back(num(it->second));
                lowest = std::min(lowest, it->second);
            }
        }
        row.push_back(num(lowest));
        row.push_back(num(flag.severity));
        csv::write_row(out, row);
    }
}

void write_type_two_table(std::ostream &out, std::span<const YearAudit> years,
                          const ReportStamp &stamp) {
    csv::write_row(out, {"config_hash", "seed", "year", "provider", "matched_n",
                         "truth_aggregate", "provider_aggregate", "ratio", "defined"});
    for (const auto &y : years) {
        for (const auto &r : y.ratios) {
            csv::write_row(out, {stamp.config_hash, num(stamp.seed), std::to_string(r.year),
                                 r.provider, num(static_cast<std::uint64_t>(r.matched_n)),
                                 num(r.truth_aggregate), num(r.provider_aggregate),
                                 r.ratio ? num(*r.ratio) : std::string(),
                                 r.ratio ? "true" : "false"});
        }
    }
}

void write_shifts_table(std::ostream &out, std::span<const GenderShiftRecord> shifts,
                        const ReportStamp &stamp) {
    csv::write_row(out, {"config_hash", "seed", "name", "year_a", "year_b", "p_female_a",
                         "p_female_b", "samples_a", "samples_b", "crossed_majority",
                         "direction"});
    for (const auto &s : shifts) {
        csv::write_row(out, {stamp.config_hash, num(stamp.seed), s.name, std::to_string(s.year_a),
                             std::to_string(s.year_b), num(s.p_female_a), num(s.p_female_b),
                             num(s.samples_a), num(s.samples_b),
                             s.crossed_majority ? "true" : "false",
                             std::string(to_string(s.direction))});
    }
}

namespace {

std::uint64_t largest_count(const TrendFit &fit) {
    std::uint64_t best = 0;
    for (const auto &p : fit.points) best = std::max(best, p.article_count);
    return best;
}

}  // namespace

void write_figure_csv(std::ostream &out, const TrendFit &fit, const ReportStamp &stamp) {
    csv::write_row(out, {"config_hash", "seed", "year", "women_pct", "article_count",
                         "bubble_radius", "fitted_pct", "slope", "intercept", "r_squared",
                         "weighted"});
    const auto biggest = largest_count(fit);
    for (const auto &p : fit.points) {
        csv::write_row(out, {stamp.config_hash, num(stamp.seed), num(p.year), num(p.women_pct),
                             num(p.article_count), num(bubble_radius(p.article_count, biggest)),
                             num(fit.predict(p.year)), num(fit.slope), num(fit.intercept),
                             num(fit.r_squared), fit.weighted ? "true" : "false"});
    }
}

// ---------------------------------------------------------------------------
// SVG

double bubble_radius(std::uint64_t article_count, std::uint64_t max_count,
                     const FigureGeometry &geometry) {
    if (max_count == 0) return 0.0;
    return geometry.max_radius *
           std::sqrt(static_cast<double>(article_count) / static_cast<double>(max_count));
}

std::string format_fixed(double value, int decimals) {
    std::string text = fmt::format("{:.{}f}", value, decimals);
    if (text.find_first_not_of("-0.") == std::string::npos && text.front() == '-') text.erase(0, 1);
    return text;
}

void write_figure_svg(std::ostream &out, const TrendFit &fit, const ReportStamp &stamp,
                      const FigureGeometry &g) {
    constexpr double left = 72.0, right = 32.0, top = 32.0, bottom = 56.0;
    const double plot_w = g.width - left - right;
    const double plot_h = g.height - top - bottom;

    double x_lo = fit.points.empty() ? 0.0 : fit.points.front().year;
    double x_hi = x_lo;
    double y_hi = 0.0;
    for (const auto &p : fit.points) {
        x_lo = std::min(x_lo, p.year);
        x_hi = std::max(x_hi, p.year);
        y_hi = std::max(y_hi, p.women_pct);
    }
    x_lo = std::floor(x_lo / 10.0) * 10.0 - 5.0;
    x_hi = std::ceil(x_hi / 10.0) * 10.0 + 5.0;
    y_hi = y_hi > 0.0 ? std::ceil(y_hi * 1.25) : 1.0;

    auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    auto sy = [&](double y) { return top + plot_h - y / y_hi * plot_h; };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << fmt::format("<!-- config_hash={} seed={} -->\n", stamp.config_hash, stamp.seed);
    out << fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
        "viewBox=\"0 0 {} {}\">\n",
        format_fixed(g.width, 0), format_fixed(g.height, 0), format_fixed(g.width, 0),
        format_fixed(g.height, 0));
    out << fmt::format("<metadata>config_hash={} seed={}</metadata>\n", stamp.config_hash,
                       stamp.seed);
    out << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Axes with decade ticks and integer percent ticks.
    out << fmt::format("<g id=\"axes\" stroke=\"black\" stroke-width=\"1\" font-family=\"sans-serif\" "
                       "font-size=\"11\">\n");
    out << fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>\n", format_fixed(left, 2),
                       format_fixed(top + plot_h, 2), format_fixed(left + plot_w, 2));
    out << fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\"/>\n", format_fixed(left, 2),
                       format_fixed(top, 2), format_fixed(top + plot_h, 2));
    for (double x = std::ceil(x_lo / 10.0) * 10.0; x <= x_hi; x += 10.0) {
        out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" stroke=\"none\">{}</text>\n",
                           format_fixed(sx(x), 2), format_fixed(top + plot_h + 18.0, 2),
                           format_fixed(x, 0));
    }
    const double y_step = y_hi > 10.0 ? std::ceil(y_hi / 10.0) : 1.0;
    for (double y = 0.0; y <= y_hi + 1e-9; y += y_step) {
        out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\" stroke=\"none\">{}</text>\n",
                           format_fixed(left - 8.0, 2), format_fixed(sy(y) + 4.0, 2),
                           format_fixed(y, 0));
    }
    out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" stroke=\"none\">year</text>\n",
                       format_fixed(left + plot_w / 2.0, 2), format_fixed(g.height - 12.0, 2));
    out << fmt::format("<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" stroke=\"none\" "
                       "transform=\"rotate(-90 16 {0})\">women %</text>\n",
                       format_fixed(top + plot_h / 2.0, 2));
    out << "</g>\n";

    const auto biggest = largest_count(fit);
    out << "<g id=\"bubbles\" fill=\"steelblue\" fill-opacity=\"0.5\" stroke=\"steelblue\">\n";
    for (const auto &p : fit.points) {
        out << fmt::format(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" data-year=\"{}\" data-women-pct=\"{}\" "
            "data-articles=\"{}\"/>\n",
            format_fixed(sx(p.year), 4), format_fixed(sy(p.women_pct), 4),
            format_fixed(bubble_radius(p.article_count, biggest, g), 9), num(p.year),
            num(p.women_pct), p.article_count);
    }
    out << "</g>\n";

    out << fmt::format(
        "<line id=\"trendline\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"firebrick\" "
        "stroke-width=\"1.5\"/>\n",
        format_fixed(sx(x_lo), 4), format_fixed(sy(fit.predict(x_lo)), 4),
        format_fixed(sx(x_hi), 4), format_fixed(sy(fit.predict(x_hi)), 4));
    out << fmt::format(
        "<text id=\"r-squared\" x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">"
        "R² = {}</text>\n",
        format_fixed(left + 12.0, 2), format_fixed(top + 16.0, 2), format_fixed(fit.r_squared, 3));
    out << "</svg>\n";
}

}  // namespace cgaudit
