// cgaudit: one subcommand per pipeline stage.

#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>

#include "cgaudit/csv.h"
#include "cgaudit/mock_server.h"
#include "cgaudit/pipeline.h"
#include "cgaudit/text.h"

namespace {

using namespace cgaudit;

struct Cli {
    RunConfig config;
    std::string years = "1950-1980";
    std::string composite = "1950-1953";
    std::string placement = "article-weighted";

    // predict
    std::vector<std::string> names;
    std::string names_file;
    int predict_year = 0;

    // mock-server
    std::string host = "127.0.0.1";
    int port = 8080;
    std::optional<std::uint64_t> quota;
    std::uint64_t fail_first = 0;
};

void add_global_options(CLI::App &app, Cli &cli) {
    auto &c = cli.config;
    app.set_config("--config", "", "Flat key = value file; command-line flags win");
    app.add_option("--ssa-dir", c.ssa_dir, "Directory of yobYYYY.txt files");
    app.add_option("--model", c.model_file, "Persisted name model CSV (instead of --ssa-dir)");
    app.add_option("--corpus", c.corpus, "DBLP-style XML file");
    app.add_option("--labels", c.labels, "Ground-truth labels CSV");
    app.add_option("--offset", c.offset, "Birth-year offset")->capture_default_str();
    app.add_option("--window", c.window, "Lookup window radius in years")->capture_default_str();
    app.add_option("--years", cli.years, "Publication years, e.g. 1950-1980")->capture_default_str();
    app.add_option("--provider", c.provider, "genderapi, namsor, genderize, local or all")
        ->capture_default_str()
        ->check(CLI::IsMember({"genderapi", "namsor", "genderize", "local", "all"}));
    app.add_option("--replay", c.replay, "Replay provider answers from this fixture");
    app.add_option("--record", c.record, "Record live provider answers to this fixture");
    app.add_option("--cache", c.cache, "Persistent response cache");
    app.add_option("--seed", c.seed, "Sampling seed")->capture_default_str();
    app.add_flag("--strict", c.strict, "Fail on malformed input instead of skipping");
    app.add_option("--out", c.out, "Output directory")->capture_default_str();
    app.add_option("--threshold", c.type_one_threshold, "Type-one flag threshold")
        ->capture_default_str();
    app.add_option("--z", c.z, "Sampling z score")->capture_default_str();
    app.add_option("--margin", c.margin, "Sampling margin of error")->capture_default_str();
    app.add_option("--proportion", c.proportion, "Assumed proportion")->capture_default_str();
    app.add_option("--sample-threshold", c.sample_threshold,
                   "Sample years whose population exceeds this")
        ->capture_default_str();
    app.add_option("--truth-female", c.truth.female, "p(F) for identified women")
        ->capture_default_str();
    app.add_option("--truth-male", c.truth.male, "p(F) for identified men")->capture_default_str();
    app.add_option("--composite", cli.composite, "Years pooled into one trend point, or none")
        ->capture_default_str();
    app.add_option("--placement", cli.placement, "Composite point year")
        ->capture_default_str()
        ->check(CLI::IsMember({"article-weighted", "midpoint"}));
    app.add_flag("--weighted-fit", c.weighted_fit, "Weight the trendline by article counts");
    app.add_option("--rate-limit", c.rate_limit, "Requests per second per provider")
        ->capture_default_str();
    app.add_option("--concurrency", c.concurrency, "Requests in flight per provider")
        ->capture_default_str();
    app.add_option("--year-a", c.year_a, "First year for shifts")->capture_default_str();
    app.add_option("--year-b", c.year_b, "Second year for shifts")->capture_default_str();
    app.add_option("--min-samples", c.min_samples, "Minimum births per year for shifts")
        ->capture_default_str();
}

void finish_config(Cli &cli) {
    auto &c = cli.config;
    c.years = parse_year_range(cli.years);
    if (cli.composite == "none" || cli.composite.empty()) {
        c.composite.reset();
    } else {
        c.composite = parse_year_range(cli.composite);
    }
    c.placement = cli.placement == "midpoint" ? CompositePlacement::Midpoint
                                              : CompositePlacement::ArticleWeighted;
    if (c.concurrency == 0) throw ConfigError("concurrency must be at least 1");
}

std::ofstream open_out(const std::filesystem::path &path) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

template <typename F>
auto run_stage(const std::string &name, F &&body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError &) {
        throw;
    } catch (const std::exception &e) {
        throw StageError(name, e.what());
    }
}

// ---------------------------------------------------------------------------

int cmd_ingest_ssa(Cli &cli) {
    IngestTally tally;
    const auto table = run_stage("ingest-ssa", [&] { return load_name_model(cli.config, &tally); });
    const auto path = cli.config.out / "name_model.csv";
    run_stage("ingest-ssa", [&] {
        auto out = open_out(path);
        write_model_csv(table, out);
    });
    std::cout << table.years().size() << " years, " << table.name_count() << " names\n";
    std::cout << tally.records_added << " records, " << tally.skipped << " skipped\n";
    for (const auto &note : tally.skip_notes) std::cerr << "  " << note << '\n';
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

std::string join_authors(const ArticleRecord &record) {
    std::string out;
    for (const auto &author : record.authors) {
        if (!out.empty()) out += "; ";
        out += author.name;
    }
    return out;
}

int cmd_ingest_corpus(Cli &cli) {
    BibliographyTally tally;
    const auto records = run_stage("ingest-corpus", [&] { return load_corpus(cli.config, &tally); });
    const auto path = cli.config.out / "corpus_index.csv";
    run_stage("ingest-corpus", [&] {
        auto out = open_out(path);
        csv::write_row(out, {"corpus_key", "year", "kind", "venue", "title", "authors"});
        for (const auto &r : records) {
            csv::write_row(out, {r.corpus_key, std::to_string(r.year), std::string(to_string(r.kind)),
                                 r.venue, r.title, join_authors(r)});
        }
    });
    std::map<int, std::size_t> per_year;
    for (const auto &r : records) ++per_year[r.year];
    std::cout << records.size() << " records in " << per_year.size() << " years, "
              << tally.skipped() << " skipped\n";
    for (const auto &note : tally.notes) std::cerr << "  " << note << '\n';
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_label(Cli &cli) {
    const auto records = run_stage("corpus", [&] { return load_corpus(cli.config, nullptr); });
    const auto labels = run_stage("labels", [&] {
        require_existing(cli.config.labels, "labels");
        return load_labels(cli.config);
    });
    const auto path = cli.config.out / "labeled_population.csv";
    std::set<std::string> matched, unmatched;
    run_stage("label", [&] {
        std::map<int, std::vector<ArticleRecord>> by_year;
        for (const auto &r : records) by_year[r.year].push_back(r);
        auto out = open_out(path);
        csv::write_row(out, {"year", "person_key", "raw_name", "given_token", "initials_only",
                             "label", "evidence"});
        for (const auto &[year, articles] : by_year) {
            auto population = build_population(articles, year);
            const auto report = attach_ground_truth(population, labels);
            unmatched.insert(report.unmatched_keys.begin(), report.unmatched_keys.end());
            for (const auto &a : population.authors) {
                if (a.ground_truth) matched.insert(a.person_key);
                csv::write_row(out, {std::to_string(year), a.person_key, a.raw_name, a.given_token,
                                     a.initials_only ? "true" : "false",
                                     a.ground_truth ? std::string(label_code(*a.ground_truth)) : "",
                                     a.truth_evidence.value_or("")});
            }
        }
    });
    std::size_t never = 0;
    for (const auto &key : unmatched) {
        if (!matched.contains(key)) {
            ++never;
            std::cerr << "  unmatched label: " << key << '\n';
        }
    }
    std::cout << labels.size() << " labels, " << matched.size() << " matched, " << never
              << " unmatched\n";
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_sample(Cli &cli) {
    const auto records = run_stage("corpus", [&] { return load_corpus(cli.config, nullptr); });
    const auto selections = run_stage("sample", [&] { return select_years(records, cli.config); });
    const auto plan_path = cli.config.out / "sample_plan.csv";
    const auto articles_path = cli.config.out / "sample_articles.csv";
    run_stage("sample", [&] {
        auto plan = open_out(plan_path);
        csv::write_row(plan, {"year", "corpus_articles", "population", "sampled", "sample_size",
                              "sampled_articles", "seed", "generator"});
        auto arts = open_out(articles_path);
        csv::write_row(arts, {"year", "corpus_key"});
        for (const auto &s : selections) {
            csv::write_row(plan, {std::to_string(s.year), std::to_string(s.corpus_articles),
                                  std::to_string(s.full_population), s.sampled ? "true" : "false",
                                  s.plan ? std::to_string(s.plan->sample_size) : "",
                                  std::to_string(s.articles.size()),
                                  s.plan ? std::to_string(s.plan->seed) : "",
                                  std::string(kSampleGenerator)});
            for (const auto &a : s.articles) csv::write_row(arts, {std::to_string(s.year), a.corpus_key});
            std::cout << s.year << ": population " << s.full_population;
            if (s.sampled) std::cout << ", sample " << s.plan->sample_size << " from "
                                     << s.articles.size() << " articles";
            std::cout << '\n';
        }
    });
    std::cout << "wrote " << plan_path.string() << '\n';
    return 0;
}

int cmd_predict(Cli &cli) {
    std::vector<std::string> names = cli.names;
    if (!cli.names_file.empty()) {
        run_stage("config", [&] {
            require_existing(cli.names_file, "names file");
            std::ifstream in(cli.names_file, std::ios::binary);
            std::string line;
            while (std::getline(in, line)) {
                if (!trim(line).empty()) names.emplace_back(trim(line));
            }
        });
    }
    if (names.empty()) throw StageError("config", "no names given");
    auto providers = run_stage("config", [&] { return selected_providers(cli.config); });

    for (auto provider : providers) {
        const std::string id(provider_id(provider));
        std::unique_ptr<Predictor> predictor = run_stage("predict:" + id, [&] {
            if (provider != Provider::LocalHistorical) return make_predictor(provider, cli.config);
            if (cli.predict_year == 0) throw ConfigError("the local provider needs --year");
            auto model = std::make_shared<const NameGenderTable>(load_name_model(cli.config));
            const int birth = birth_year_for_publication(cli.predict_year, cli.config.offset);
            return std::make_unique<Predictor>(
                std::make_shared<LocalHistoricalSource>(model, birth, cli.config.window));
        });
        const auto batch = predictor->predict_batch(names, cli.config.concurrency);
        for (const auto &response : batch.responses) std::cout << to_json_line(response) << '\n';
        if (!batch.complete()) {
            try {
                std::rethrow_exception(batch.error);
            } catch (const std::exception &e) {
                throw StageError("predict:" + id, e.what());
            }
        }
    }
    return 0;
}

int cmd_audit(Cli &cli) {
    const auto result = run_audit(cli.config, std::cerr);
    run_stage("report", [&] { write_audit_outputs(result, cli.config.out); });
    std::cout << "config " << result.stamp.config_hash << " seed " << result.stamp.seed << '\n';
    std::cout << result.type_one.flags.size() << " type-one flags";
    if (result.ratio_summary) {
        std::cout << ", ratio median " << format_fixed(result.ratio_summary->median, 3) << " mean "
                  << format_fixed(result.ratio_summary->mean, 3);
    }
    if (result.trend) std::cout << ", R^2 " << format_fixed(result.trend->r_squared, 3);
    std::cout << "\nwrote " << cli.config.out.string() << '\n';
    return 0;
}

int cmd_shifts(Cli &cli) {
    const auto table = run_stage("name-model", [&] { return load_name_model(cli.config); });
    const auto &c = cli.config;
    const auto shifts = run_stage("shifts", [&] {
        return detect_gender_shifts(table, c.year_a, c.year_b, c.min_samples);
    });
    const auto path = c.out / "shifts.csv";
    run_stage("report", [&] {
        auto out = open_out(path);
        write_shifts_table(out, shifts, ReportStamp{config_hash(c), c.seed});
    });
    const auto crossed = std::count_if(shifts.begin(), shifts.end(),
                                       [](const GenderShiftRecord &s) { return s.crossed_majority; });
    std::cout << shifts.size() << " names compared, " << crossed << " crossed majority\n";
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

extern "C" void on_signal(int) {}

int cmd_mock_server(Cli &cli) {
    auto fixtures = run_stage("mock-server", [&] {
        require_existing(cli.config.replay, "fixture");
        return std::make_shared<const FixtureStore>(cli.config.replay);
    });
    MockServerOptions options;
    options.host = cli.host;
    options.port = cli.port;
    options.quota = cli.quota;
    options.fail_first = cli.fail_first;
    MockProviderServer server(fixtures, options);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    // Blocked here (and in the server thread), delivered only inside sigsuspend.
    sigset_t blocked;
    sigemptyset(&blocked);
    sigaddset(&blocked, SIGINT);
    sigaddset(&blocked, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &blocked, nullptr);
    const int port = run_stage("mock-server", [&] { return server.start(); });
    std::cout << "serving " << fixtures->size() << " fixture records on port " << port << '\n';
    for (auto provider : remote_providers()) {
        std::string var = "CG_" + std::string(provider_id(provider)) + "_URL";
        for (auto &ch : var) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        std::cout << "  " << var << "=" << server.base_url(provider) << '\n';
    }
    std::cout.flush();
    // Serve until SIGINT or SIGTERM.
    sigset_t mask;
    sigemptyset(&mask);
    sigsuspend(&mask);
    server.stop();
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    Cli cli;
    CLI::App app{"Audit gender inference over a bibliography"};
    app.require_subcommand(1);
    app.fallthrough();
    add_global_options(app, cli);

    auto *ingest_ssa = app.add_subcommand("ingest-ssa", "Build the name model from SSA files");
    auto *ingest_corpus = app.add_subcommand("ingest-corpus", "Parse and index the corpus");
    auto *label = app.add_subcommand("label", "Attach ground-truth labels to populations");
    auto *sample = app.add_subcommand("sample", "Plan and draw per-year samples");
    auto *predict = app.add_subcommand("predict", "Query providers for first names");
    predict->add_option("names", cli.names, "First names");
    predict->add_option("--names-file", cli.names_file, "File with one name per line");
    predict->add_option("--year", cli.predict_year, "Publication year for the local provider");
    auto *audit = app.add_subcommand("audit", "Run the full audit and write reports");
    auto *shifts = app.add_subcommand("shifts", "Compare name gender between two years");
    auto *mock = app.add_subcommand("mock-server", "Serve a fixture as the three provider APIs");
    mock->add_option("--host", cli.host)->capture_default_str();
    mock->add_option("--port", cli.port, "0 picks a free port")->capture_default_str();
    mock->add_option("--quota", cli.quota, "Requests per provider before 429");
    mock->add_option("--fail-first", cli.fail_first, "Requests per provider answered 503");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }

    try {
        run_stage("config", [&] { finish_config(cli); });
        if (*ingest_ssa) return cmd_ingest_ssa(cli);
        if (*ingest_corpus) return cmd_ingest_corpus(cli);
        if (*label) return cmd_label(cli);
        if (*sample) return cmd_sample(cli);
        if (*predict) return cmd_predict(cli);
        if (*audit) return cmd_audit(cli);
        if (*shifts) return cmd_shifts(cli);
        if (*mock) return cmd_mock_server(cli);
    } catch (const StageError &e) {
        std::cerr << "cgaudit: " << e.stage() << " failed: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "cgaudit: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
