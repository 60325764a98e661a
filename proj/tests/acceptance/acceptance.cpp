// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cgaudit/audit.h"
#include "cgaudit/bibliography.h"
#include "cgaudit/name_model.h"
#include "cgaudit/pipeline.h"
#include "cgaudit/predictor.h"
#include "cgaudit/sampling.h"
#include "cgaudit/text.h"
#include "cgaudit/trend.h"
#include "test_support.h"

using namespace cgaudit;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool condition, const std::string &what) {
        if (!condition) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt_double(double v) {
    std::ostringstream out;
    out.precision(12);
    out << v;
    return out.str();
}

Check sample_sizes() {
    Check c;
    const auto a = sample_size(100000);
    const auto b = sample_size(620);
    c.expect(a == 383, "N=100000 gave " + std::to_string(a));
    c.expect(b == 238, "N=620 gave " + std::to_string(b));
    return c;
}

Check leslie_lookups() {
    Check c;
    NameTableBuilder builder;
    builder.ingest_directory(test::data_dir() / "ssa");
    const auto table = std::move(builder).build();
    const auto p1900 = lookup_p_female(table, "Leslie", 1900);
    const auto p1950 = lookup_p_female(table, "Leslie", 1950);
    const auto p2000 = lookup_p_female(table, "Leslie", 2000);
    c.expect(p1900.known() && p1900.p_female() == 0.08, "1900 gave " + fmt_double(p1900.known() ? p1900.p_female() : -1));
    c.expect(p1950.known() && p1950.p_female() == 0.52, "1950 gave " + fmt_double(p1950.known() ? p1950.p_female() : -1));
    c.expect(p2000.known() && p2000.p_female() >= 0.96, "2000 gave " + fmt_double(p2000.known() ? p2000.p_female() : -1));
    return c;
}

Check back_calculation() {
    Check c;
    const auto a = back_calculate_counts(0.91, 11, Majority::Male);
    c.expect(a.male_count == 10 && a.female_count == 1 && a.consistent, "(0.91, 11) mismatch");
    const auto b = back_calculate_counts(1.0, 4, Majority::Male);
    c.expect(b.male_count == 4 && b.female_count == 0 && b.small_sample_certainty,
             "(1.0, 4) not flagged");
    return c;
}

Check type_one_replay() {
    Check c;
    const char *women[] = {"Mandalay Grems",       "Florence Jessie MacWilliams", "Jean Estelle Rubin",
                           "Love H. Seawright",    "Joan Marie Francioni",        "Shigeko Seki",
                           "Harriet H. Kagiwada",  "Mildred S. Joseph"};
    PopulationYear pop;
    pop.year = 1970;
    for (const char *name : women) {
        AuthorRecord a;
        a.raw_name = name;
        a.person_key = fold_name(name);
        a.given_token = extract_given_token(name).token;
        a.ground_truth = TruthLabel::Female;
        a.effective = GenderEstimate::ground_truth(0.9999);
        a.effective_source = EffectiveSource::GroundTruth;
        pop.authors.push_back(a);
    }
    auto store = std::make_shared<FixtureStore>(test::data_dir() / "fixtures" / "table3.jsonl");
    ProviderEstimates estimates;
    for (auto provider : remote_providers()) {
        Predictor p(std::make_shared<ReplaySource>(provider, store));
        std::vector<std::string> names;
        for (const auto &a : pop.authors) names.push_back(a.given_token);
        const auto batch = p.predict_batch(names);
        c.expect(batch.complete(), "replay incomplete for " + std::string(provider_id(provider)));
        for (const auto &r : batch.responses) {
            estimates[std::string(provider_id(provider))].emplace(r.queried_name, r.estimate);
        }
    }
    const auto pairs = build_matched_set(pop, estimates);
    const auto report = detect_type_one(pairs);
    c.expect(report.flags.size() == 8, std::to_string(report.flags.size()) + " flagged");
    c.expect(report.median_flagged_p_female &&
                 std::abs(*report.median_flagged_p_female - 0.615) <= 0.0005,
             "median " + fmt_double(report.median_flagged_p_female.value_or(-1)));
    return c;
}

Check ratio_summary() {
    Check c;
    const double table[7][3] = {{1.25, 1.42, 1.19}, {39.73, 59.21, 37.74}, {36.01, 71.64, 31.71},
                                {2.73, 3.52, 3.14}, {1.72, 2.07, 1.78},    {1.78, 2.39, 1.85},
                                {1.69, 2.13, 1.71}};
    const char *providers[3] = {"genderapi", "namsor", "genderize"};
    std::vector<TypeTwoRatio> ratios;
    for (int y = 0; y < 7; ++y) {
        for (int p = 0; p < 3; ++p) {
            TypeTwoRatio r;
            r.year = 1950 + y;
            r.provider = providers[p];
            r.ratio = table[y][p];
            ratios.push_back(r);
        }
    }
    const auto s = summarize_ratios(ratios);
    c.expect(s.median == 2.13, "median " + fmt_double(s.median));
    c.expect(std::abs(s.mean - 14.6) <= 0.2, "mean " + fmt_double(s.mean));
    return c;
}

Check trendline() {
    Check c;
    const std::vector<TrendPoint> pts{{1951.5, 1.73, 1}, {1960, 2.702, 1}, {1970, 3.108, 1}, {1980, 4.078, 1}};
    const auto fit = fit_trendline(pts);
    // Oracle: squared Pearson correlation from raw sums in long double.
    long double n = pts.size(), sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (const auto &p : pts) {
        sx += p.year;
        sy += p.women_pct;
        sxx += (long double)p.year * p.year;
        syy += (long double)p.women_pct * p.women_pct;
        sxy += (long double)p.year * p.women_pct;
    }
    const long double r = (n * sxy - sx * sy) /
                          std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    const double oracle = static_cast<double>(r * r);
    c.expect(std::abs(fit.r_squared - 0.97) <= 0.02, "R^2 " + fmt_double(fit.r_squared));
    c.expect(std::abs(fit.r_squared - oracle) <= 1e-9, "oracle " + fmt_double(oracle));
    return c;
}

Check identity_and_scale() {
    Check c;
    std::mt19937_64 rng(2021);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 60);
    int cases = 0;
    for (; cases < 1000; ++cases) {
        std::vector<MatchedPair> pairs(size(rng));
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            pairs[i].person_key = "p" + std::to_string(i);
            pairs[i].truth_p_female = unit(rng) < 0.3 ? 0.9999 : std::max(0.0001, unit(rng));
            pairs[i].provider_p_female["namsor"] = unit(rng);
        }
        auto same = pairs;
        for (auto &p : same) p.provider_p_female["namsor"] = p.truth_p_female;
        const auto identity = compute_type_two(same, "namsor");
        if (!identity.ratio || std::abs(*identity.ratio - 1.0) > 1e-12) {
            c.expect(false, "identity case " + std::to_string(cases));
            break;
        }
        const double k = 0.05 + unit(rng) * 0.95;
        auto scaled = pairs;
        for (auto &p : scaled) p.provider_p_female["namsor"] *= k;
        const double base = *compute_type_two(pairs, "namsor").ratio;
        const double after = *compute_type_two(scaled, "namsor").ratio;
        if (std::abs(after - k * base) > 1e-12 * std::max(1.0, k * base)) {
            c.expect(false, "scale case " + std::to_string(cases));
            break;
        }
    }
    c.expect(cases == 1000, "ran " + std::to_string(cases) + " cases");
    return c;
}

Check edge_case_preservation() {
    Check c;
    std::mt19937_64 rng(1950);
    const std::vector<std::string> given{"Leslie", "Jan", "Chris", "Robin", "Mary", "John",
                                         "J.", "A. B.", "Kim", "Sasha", "Zzyzx"};
    const std::vector<std::string> family{"Smith", "Church", "Kleene", "Marcus", "Wang", "Post"};
    NameTableBuilder builder;
    std::uniform_int_distribution<int> count(0, 500);
    for (const auto &g : given) {
        if (g == "Zzyzx" || g.find('.') != std::string::npos) continue;
        for (int year = 1915; year <= 1955; ++year) builder.add(g, year, SexCounts{std::uint64_t(count(rng) + 1), std::uint64_t(count(rng))});
    }
    const auto model = std::move(builder).build();
    std::uniform_int_distribution<std::size_t> pick_given(0, given.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_family(0, family.size() - 1);
    std::uniform_int_distribution<int> articles_per_year(1, 20);
    std::uniform_int_distribution<int> authors_per_article(1, 4);
    std::uniform_int_distribution<int> label_roll(0, 9);

    int cases = 0;
    for (; cases < 1000 && c.ok; ++cases) {
        const int year = 1950 + cases % 31;
        std::vector<ArticleRecord> articles(articles_per_year(rng));
        for (std::size_t i = 0; i < articles.size(); ++i) {
            articles[i].corpus_key = "k" + std::to_string(i);
            articles[i].year = year;
            const int n = authors_per_article(rng);
            for (int a = 0; a < n; ++a) {
                articles[i].authors.push_back(
                    AuthorMention{given[pick_given(rng)] + " " + family[pick_family(rng)], ""});
            }
        }
        PopulationYear pop = build_population(articles, year);
        GroundTruthTable labels;
        for (const auto &a : pop.authors) {
            const int roll = label_roll(rng);
            if (roll < 3) {
                labels.add({a.person_key, a.raw_name,
                            roll == 0 ? TruthLabel::Female
                                      : (roll == 1 ? TruthLabel::Male : TruthLabel::UnknownAfterResearch),
                            "", 0});
            }
        }
        attach_ground_truth(pop, labels);
        const std::size_t before = pop.authors.size();
        const auto resolved = resolve_population_gender(pop, model);
        if (resolved.authors.size() != before) {
            c.expect(false, "member count changed in case " + std::to_string(cases));
            break;
        }
        // Every member with a fractional p(F) is counted in the tabulation and
        // reaches the matched set when a provider answers for its name.
        ProviderEstimates estimates;
        double expected = 0.0;
        std::size_t fractional = 0;
        for (const auto &a : resolved.authors) {
            if (!a.effective.known()) continue;
            expected += a.effective.p_female();
            if (a.initials_only) continue;
            estimates["genderize"].emplace(fold_name(a.given_token),
                                           GenderEstimate::from_provider("genderize", 0.5, 1));
            const double p = a.effective.p_female();
            if (p > 0.0001 && p < 0.9999) ++fractional;
        }
        if (std::abs(expected - resolved.expected_women) > 1e-9) {
            c.expect(false, "tabulation dropped a member in case " + std::to_string(cases));
            break;
        }
        const auto pairs = build_matched_set(resolved, estimates);
        std::size_t fractional_pairs = 0;
        for (const auto &p : pairs) {
            if (p.truth_p_female > 0.0001 && p.truth_p_female < 0.9999) ++fractional_pairs;
        }
        if (fractional_pairs != fractional) {
            c.expect(false, "matched set dropped a fractional name in case " + std::to_string(cases));
            break;
        }
    }
    c.expect(cases >= 1000, "ran " + std::to_string(cases) + " cases");
    return c;
}

long peak_rss_kb() {
    rusage usage{};
    getrusage(RUSAGE_SELF, &usage);
    return usage.ru_maxrss;
}

Check streaming_bound() {
    Check c;
    constexpr std::uint64_t kTargetBytes = 1ull << 30;
    const std::uint64_t records =
        kTargetBytes / test::SyntheticDblpStream::min_record_bytes() + 1;
    test::SyntheticDblpStream source(records);
    std::istream in(&source);
    BibliographyReader reader(in);
    std::uint64_t count = 0;
    while (reader.next()) ++count;
    const long peak_mb = peak_rss_kb() / 1024;
    c.expect(source.bytes() >= kTargetBytes, "only " + std::to_string(source.bytes()) + " bytes");
    c.expect(count == source.records_emitted(),
             std::to_string(count) + " of " + std::to_string(source.records_emitted()) + " records");
    c.expect(peak_mb < 256, "peak RSS " + std::to_string(peak_mb) + " MB");
    if (c.ok) {
        c.detail = std::to_string(count) + " records, " + std::to_string(source.bytes() >> 20) +
                   " MiB, peak RSS " + std::to_string(peak_mb) + " MB";
    }
    return c;
}

Check determinism() {
    Check c;
    RunConfig config;
    config.ssa_dir = test::data_dir() / "ssa";
    config.corpus = test::data_dir() / "dblp.xml";
    config.labels = test::data_dir() / "labels.csv";
    config.replay = test::data_dir() / "fixtures" / "providers.jsonl";
    config.seed = 1;
    test::TempDir a, b;
    std::ostringstream log;
    write_audit_outputs(run_audit(config, log), a.path());
    write_audit_outputs(run_audit(config, log), b.path());
    int files = 0;
    for (const auto &entry : std::filesystem::directory_iterator(a.path())) {
        ++files;
        const auto name = entry.path().filename();
        c.expect(test::read_file(entry.path()) == test::read_file(b.path() / name),
                 name.string() + " differs");
    }
    c.expect(files == 7, std::to_string(files) + " files written");
    return c;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
        {"sample sizes 383 and 238", sample_sizes},
        {"Leslie lookups 1900/1950/2000", leslie_lookups},
        {"accuracy back-calculation", back_calculation},
        {"type-one replay: 8 women, median 0.615", type_one_replay},
        {"ratio summary: median 2.13, mean 14.6", ratio_summary},
        {"trendline R^2 0.97 against oracle", trendline},
        {"identity and scale laws", identity_and_scale},
        {"edge-case preservation", edge_case_preservation},
        {"1 GB streaming under 256 MB", streaming_bound},
        {"byte-identical audit reruns", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Check result;
        try {
            result = criteria[i].second();
        } catch (const std::exception &e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        if (!result.ok) ++failures;
        std::cout << (result.ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first
                  << " (" << ms << " ms)";
        if (!result.detail.empty()) std::cout << ": " << result.detail;
        std::cout << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
