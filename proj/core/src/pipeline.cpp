#include "cgaudit/pipeline.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <json.hpp>
#include <set>

#include "cgaudit/http_source.h"
#include "cgaudit/text.h"

namespace cgaudit {

using nlohmann::json;

namespace {

template <typename F>
auto stage(const std::string &name, F &&body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError &) {
        throw;
    } catch (const std::exception &e) {
        throw StageError(name, e.what());
    }
}

ParseMode mode_of(const RunConfig &config) {
    return config.strict ? ParseMode::Strict : ParseMode::Lenient;
}

std::ofstream open_output(const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

NameGenderTable load_name_model(const RunConfig &config, IngestTally *tally) {
    NameTableBuilder builder;
    IngestTally local;
    if (!config.model_file.empty()) {
        require_existing(config.model_file, "name model");
        std::ifstream in(config.model_file, std::ios::binary);
        local = builder.ingest_model_csv(in, ParseMode::Strict);
    } else {
        require_existing(config.ssa_dir, "SSA directory");
        local = builder.ingest_directory(config.ssa_dir, mode_of(config));
    }
    if (tally) *tally = local;
    return std::move(builder).build();
}

std::vector<ArticleRecord> load_corpus(const RunConfig &config, BibliographyTally *tally) {
    require_existing(config.corpus, "corpus");
    std::ifstream in(config.corpus, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + config.corpus.string());
    BibliographyOptions options;
    options.mode = mode_of(config);
    options.reject_duplicate_keys = true;
    std::set<int> years;
    for (int y = config.years.first; y <= config.years.last; ++y) years.insert(y);
    options.year_filter = std::move(years);
    return parse_bibliography(in, options, tally);
}

GroundTruthTable load_labels(const RunConfig &config) {
    GroundTruthTable table;
    if (config.labels.empty()) return table;
    require_existing(config.labels, "labels");
    std::ifstream in(config.labels, std::ios::binary);
    table.ingest(in);
    return table;
}

std::vector<YearSelection> select_years(const std::vector<ArticleRecord> &articles,
                                        const RunConfig &config) {
    std::map<int, std::vector<ArticleRecord>> by_year;
    for (const auto &article : articles) by_year[article.year].push_back(article);

    std::vector<YearSelection> out;
    for (auto &[year, year_articles] : by_year) {
        YearSelection sel;
        sel.year = year;
        sel.corpus_articles = year_articles.size();
        sel.full_population = build_population(year_articles, year).authors.size();
        if (sel.full_population > config.sample_threshold) {
            sel.sampled = true;
            sel.plan = make_sample_plan(sel.full_population, derive_seed(config.seed, year),
                                        config.z, config.margin, config.proportion);
            std::set<std::string> people;
            std::vector<std::size_t> picked;
            for (std::size_t index : random_permutation(year_articles.size(), sel.plan->seed)) {
                if (people.size() >= sel.plan->sample_size) break;
                picked.push_back(index);
                for (const auto &author : year_articles[index].authors) {
                    people.insert(person_key_for(author));
                }
            }
            std::sort(picked.begin(), picked.end());
            for (std::size_t index : picked) sel.articles.push_back(std::move(year_articles[index]));
        } else {
            sel.articles = std::move(year_articles);
        }
        out.push_back(std::move(sel));
    }
    return out;
}

std::unique_ptr<Predictor> make_predictor(Provider provider, const RunConfig &config) {
    if (provider == Provider::LocalHistorical) {
        throw std::invalid_argument("the local provider is built per year");
    }
    std::shared_ptr<ResponseCache> cache;
    if (!config.cache.empty()) cache = std::make_shared<ResponseCache>(config.cache);

    if (!config.replay.empty()) {
        require_existing(config.replay, "replay fixture");
        auto store = std::make_shared<const FixtureStore>(config.replay);
        return std::make_unique<Predictor>(std::make_shared<ReplaySource>(provider, store), cache);
    }

    HttpEndpoint endpoint = endpoint_from_environment(provider);
    if (endpoint.api_key.empty()) {
        throw ConfigError("no API key for " + std::string(provider_id(provider)) + ": set " +
                          std::string(credential_env_var(provider)) + " or use --replay");
    }
    std::shared_ptr<PayloadSource> source =
        std::make_shared<HttpPayloadSource>(provider, std::move(endpoint));
    if (!config.record.empty()) {
        source = std::make_shared<RecordingSource>(std::move(source),
                                                   std::make_shared<FixtureStore>(config.record));
    }
    return std::make_unique<Predictor>(std::move(source), cache,
                                       std::make_shared<RateLimiter>(config.rate_limit));
}

namespace {

std::vector<std::string> given_names_of(const PopulationYear &population) {
    std::set<std::string> names;
    for (const auto &author : population.authors) {
        if (author.initials_only || author.given_token.empty()) continue;
        if (!author.effective.known()) continue;
        names.insert(fold_name(author.given_token));
    }
    return {names.begin(), names.end()};
}

void collect(const BatchResult &batch, std::string_view provider,
             std::unordered_map<std::string, GenderEstimate> &into) {
    for (const auto &response : batch.responses) into.emplace(response.queried_name, response.estimate);
    if (!batch.complete()) {
        try {
            std::rethrow_exception(batch.error);
        } catch (const std::exception &e) {
            throw StageError("predict:" + std::string(provider), e.what());
        }
    }
}

}  // namespace

AuditResult run_audit(const RunConfig &config, std::ostream &log) {
    AuditResult result;
    result.config = config;
    result.stamp = ReportStamp{config_hash(config), config.seed};

    const auto providers = stage("config", [&] {
        auto selected = selected_providers(config);
        if (config.type_one_threshold <= 0.0 || config.type_one_threshold > 1.0) {
            throw ConfigError("type-one threshold must be in (0, 1]");
        }
        return selected;
    });
    for (auto p : providers) result.providers.emplace_back(provider_id(p));

    auto model = std::make_shared<const NameGenderTable>(
        stage("name-model", [&] { return load_name_model(config, &result.model_tally); }));
    log << "name model: " << model->years().size() << " years, " << model->name_count()
        << " names\n";

    const auto articles =
        stage("corpus", [&] { return load_corpus(config, &result.corpus_tally); });
    log << "corpus: " << articles.size() << " records in " << config.years.first << "-"
        << config.years.last << ", " << result.corpus_tally.skipped() << " skipped\n";

    const auto labels = stage("labels", [&] { return load_labels(config); });
    result.labels_loaded = labels.size();

    auto selections = stage("sample", [&] { return select_years(articles, config); });

    std::set<std::string> unmatched;
    std::set<std::string> matched_anywhere;
    stage("population", [&] {
        ResolveOptions options{config.offset, config.window, config.truth};
        for (auto &sel : selections) {
            YearAudit audit;
            PopulationYear population = build_population(sel.articles, sel.year);
            const AttachReport attached = attach_ground_truth(population, labels);
            audit.population = resolve_population_gender(std::move(population), *model, options);
            for (const auto &key : attached.unmatched_keys) unmatched.insert(key);
            for (const auto &author : audit.population.authors) {
                if (author.ground_truth) matched_anywhere.insert(author.person_key);
            }
            audit.corpus_articles = sel.corpus_articles;
            audit.full_population = sel.full_population;
            audit.sampled = sel.sampled;
            audit.plan = sel.plan;
            result.years.push_back(std::move(audit));
        }
    });
    for (const auto &key : unmatched) {
        if (!matched_anywhere.contains(key)) result.unmatched_labels.push_back(key);
    }

    // Remote answers do not depend on the year, so each distinct name is asked once.
    std::set<std::string> all_names;
    for (const auto &y : result.years) {
        for (auto &name : given_names_of(y.population)) all_names.insert(std::move(name));
    }
    const std::vector<std::string> name_list(all_names.begin(), all_names.end());

    ProviderEstimates shared;
    for (auto provider : providers) {
        if (provider == Provider::LocalHistorical) continue;
        const std::string id(provider_id(provider));
        auto predictor = stage("predict:" + id, [&] { return make_predictor(provider, config); });
        const BatchResult batch = predictor->predict_batch(name_list, config.concurrency);
        collect(batch, id, shared[id]);
        log << id << ": " << batch.responses.size() << " names, " << predictor->source_calls()
            << " source calls\n";
    }

    std::vector<MatchedPair> type_one_pool;
    std::set<std::string> pooled;
    for (auto &y : result.years) {
        ProviderEstimates estimates = shared;
        if (std::find(providers.begin(), providers.end(), Provider::LocalHistorical) !=
            providers.end()) {
            const int birth_year = stage("predict:local", [&] {
                return birth_year_for_publication(y.population.year, config.offset);
            });
            Predictor local(std::make_shared<LocalHistoricalSource>(model, birth_year, config.window));
            const auto names = given_names_of(y.population);
            collect(local.predict_batch(names), "local", estimates["local"]);
        }
        stage("audit", [&] {
            y.pairs = build_matched_set(y.population, estimates);
            for (const auto &id : result.providers) {
                y.ratios.push_back(compute_type_two(y.pairs, id, y.population.year));
            }
        });
        for (const auto &pair : y.pairs) {
            if (pooled.insert(pair.person_key).second) type_one_pool.push_back(pair);
        }
    }

    stage("audit", [&] {
        std::sort(type_one_pool.begin(), type_one_pool.end(),
                  [](const MatchedPair &a, const MatchedPair &b) { return a.person_key < b.person_key; });
        result.type_one = detect_type_one(type_one_pool, config.type_one_threshold);

        std::vector<TypeTwoRatio> ratios;
        for (const auto &y : result.years) ratios.insert(ratios.end(), y.ratios.begin(), y.ratios.end());
        if (std::any_of(ratios.begin(), ratios.end(), [](const TypeTwoRatio &r) { return r.ratio; })) {
            result.ratio_summary = summarize_ratios(ratios);
        }
    });

    stage("trend", [&] {
        std::vector<TrendPoint> points;
        std::vector<YearTotals> composite;
        for (const auto &y : result.years) {
            const auto &pop = y.population;
            if (pop.authors.empty()) continue;
            if (config.composite && config.composite->contains(pop.year)) {
                composite.push_back(YearTotals{pop.year, pop.expected_women,
                                               pop.authors.size(), y.corpus_articles});
                continue;
            }
            points.push_back(TrendPoint{static_cast<double>(pop.year), 100.0 * pop.women_pct,
                                        y.corpus_articles});
        }
        if (!composite.empty()) points.insert(points.begin(), composite_point(composite, config.placement));
        std::set<double> distinct;
        for (const auto &p : points) distinct.insert(p.year);
        if (distinct.size() >= 2) result.trend = fit_trendline(points, config.weighted_fit);
    });
    return result;
}

std::string summary_json(const AuditResult &result) {
    json config = json::object();
    for (const auto &[key, value] : canonical_entries(result.config)) config[key] = value;

    json years = json::array();
    for (const auto &y : result.years) {
        const auto &pop = y.population;
        years.push_back({
            {"year", pop.year},
            {"articles", pop.article_count},
            {"corpus_articles", y.corpus_articles},
            {"population", pop.authors.size()},
            {"full_population", y.full_population},
            {"labeled", pop.labeled_count()},
            {"identified_fraction", pop.identified_fraction},
            {"expected_women", pop.expected_women},
            {"women_pct", 100.0 * pop.women_pct},
            {"sampled", y.sampled},
            {"sample_size", y.plan ? json(y.plan->sample_size) : json(nullptr)},
            {"matched_pairs", y.pairs.size()},
        });
    }

    json type_one = {
        {"threshold", result.config.type_one_threshold},
        {"flagged", result.type_one.flags.size()},
        {"median_flagged_p_female", result.type_one.median_flagged_p_female
                                        ? json(*result.type_one.median_flagged_p_female)
                                        : json(nullptr)},
    };

    json type_two = nullptr;
    if (result.ratio_summary) {
        const auto &s = *result.ratio_summary;
        json per_provider = json::object();
        for (const auto &[provider, stats] : s.per_provider) {
            per_provider[provider] = {{"median", stats.median}, {"mean", stats.mean},
                                      {"count", stats.count}};
        }
        type_two = {{"median", s.median},
                    {"mean", s.mean},
                    {"defined", s.defined_count},
                    {"undefined", s.undefined_count},
                    {"per_provider", per_provider}};
    }

    json trend = nullptr;
    if (result.trend) {
        const auto &t = *result.trend;
        json points = json::array();
        for (const auto &p : t.points) {
            points.push_back({{"year", p.year}, {"women_pct", p.women_pct},
                              {"article_count", p.article_count}});
        }
        trend = {{"slope", t.slope},         {"intercept", t.intercept},
                 {"r_squared", t.r_squared}, {"degenerate", t.degenerate},
                 {"weighted", t.weighted},   {"points", points}};
    }

    const auto &ct = result.corpus_tally;
    const auto &mt = result.model_tally;
    json doc = {
        {"schema_version", 1},
        {"config_hash", result.stamp.config_hash},
        {"seed", result.stamp.seed},
        {"sample_generator", std::string(kSampleGenerator)},
        {"config", config},
        {"providers", result.providers},
        {"years", years},
        {"type_one", type_one},
        {"type_two", type_two},
        {"trend", trend},
        {"tallies",
         {{"model_records", mt.records_added},
          {"model_lines_skipped", mt.skipped},
          {"corpus_records_seen", ct.records_seen},
          {"corpus_records_yielded", ct.records_yielded},
          {"corpus_skipped", ct.skipped()},
          {"labels_loaded", result.labels_loaded}}},
        {"unmatched_labels", result.unmatched_labels.size()},
    };
    return doc.dump(2) + "\n";
}

void write_audit_outputs(const AuditResult &result, const std::filesystem::path &out_dir) {
    std::filesystem::create_directories(out_dir);

    std::vector<YearAudit> full, sampled;
    for (const auto &y : result.years) (y.sampled ? sampled : full).push_back(y);
    {
        auto out = open_output(out_dir / "table1.csv");
        write_population_table(out, full, result.stamp);
    }
    {
        auto out = open_output(out_dir / "table2.csv");
        write_population_table(out, sampled, result.stamp);
    }
    {
        auto out = open_output(out_dir / "table3.csv");
        write_type_one_table(out, result.type_one, result.providers, result.stamp);
    }
    {
        auto out = open_output(out_dir / "table4.csv");
        write_type_two_table(out, result.years, result.stamp);
    }
    {
        auto out = open_output(out_dir / "summary.json");
        out << summary_json(result);
    }
    const TrendFit fit = result.trend.value_or(TrendFit{});
    {
        auto out = open_output(out_dir / "figure1.svg");
        write_figure_svg(out, fit, result.stamp);
    }
    {
        auto out = open_output(out_dir / "figure1.csv");
        write_figure_csv(out, fit, result.stamp);
    }
}

}  // namespace cgaudit
