#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgaudit/bibliography.h"
#include "cgaudit/name_model.h"
#include "cgaudit/population.h"
#include "cgaudit/predictor.h"
#include "cgaudit/report.h"

namespace cgaudit {

/// Failure of one pipeline stage; `stage` names it for diagnostics.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string &what)
        : std::runtime_error(what), stage_(std::move(stage)) {}
    const std::string &stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// Loads the name model from config.model_file when set, else config.ssa_dir.
NameGenderTable load_name_model(const RunConfig &config, IngestTally *tally = nullptr);

/// Parses config.corpus restricted to config.years.
std::vector<ArticleRecord> load_corpus(const RunConfig &config, BibliographyTally *tally = nullptr);

GroundTruthTable load_labels(const RunConfig &config);

/// Articles of one year, the population drawn from them and whether the year
/// was sampled.
struct YearSelection {
    int year = 0;
    std::vector<ArticleRecord> articles;
    std::size_t corpus_articles = 0;
    std::size_t full_population = 0;
    bool sampled = false;
    std::optional<SamplePlan> plan;
};

/// Groups articles by year and samples years whose population exceeds
/// config.sample_threshold: the sample size n is computed on the author
/// population, then articles are taken in seeded random order until their
/// authors number at least n. Selected articles keep corpus order.
std::vector<YearSelection> select_years(const std::vector<ArticleRecord> &articles,
                                        const RunConfig &config);

/// Predictor for a remote provider, wired to replay, record or live HTTP
/// according to the config. Live mode needs the provider's API key. The local
/// provider is year specific and is built by run_audit instead.
std::unique_ptr<Predictor> make_predictor(Provider provider, const RunConfig &config);

struct AuditResult {
    RunConfig config;
    ReportStamp stamp;
    std::vector<std::string> providers;
    std::vector<YearAudit> years;
    TypeOneReport type_one;
    std::optional<RatioSummary> ratio_summary;
    std::optional<TrendFit> trend;
    IngestTally model_tally;
    BibliographyTally corpus_tally;
    std::size_t labels_loaded = 0;
    std::vector<std::string> unmatched_labels;
};

/// Runs the whole audit. Throws StageError naming the failing stage.
AuditResult run_audit(const RunConfig &config, std::ostream &log);

/// Writes table1.csv, table2.csv, table3.csv, table4.csv, summary.json,
/// figure1.svg and figure1.csv into `out_dir`.
void write_audit_outputs(const AuditResult &result, const std::filesystem::path &out_dir);

/// summary.json contents.
std::string summary_json(const AuditResult &result);

}  // namespace cgaudit
