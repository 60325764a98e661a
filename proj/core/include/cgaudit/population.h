#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cgaudit/bibliography.h"
#include "cgaudit/estimate.h"
#include "cgaudit/name_model.h"

namespace cgaudit {

enum class TruthLabel { Female, Male, UnknownAfterResearch };

std::string_view to_string(TruthLabel label) noexcept;
/// "F", "M" or "U".
std::string_view label_code(TruthLabel label) noexcept;

/// p(F) assigned to personally identified persons.
struct TruthConstants {
    double female = 0.9999;
    double male = 0.0001;
};

/// Person key of an author mention: "pid:<id>" when the corpus supplies an
/// identifier, else the folded full name.
std::string person_key_for(const AuthorMention &mention);

/// Normalizes a key read from a label file the same way person_key_for does.
std::string normalize_person_key(std::string_view key);

struct GroundTruthRow {
    std::string person_key;
    std::string raw_name;
    TruthLabel label = TruthLabel::UnknownAfterResearch;
    std::string evidence;
    std::size_t line = 0;
};

/// Human identification labels keyed by normalized person key.
class GroundTruthTable {
public:
    /// Reads a `person_key,raw_name,label,evidence` CSV with header. Labels are
    /// F, M or U. A repeated row with the same label is ignored; a repeated
    /// key with a different label or an unknown label code throws
    /// std::runtime_error naming the line. Returns the number of new labels.
    std::size_t ingest(std::istream &in);

    void add(GroundTruthRow row);

    const GroundTruthRow *find(std::string_view person_key) const;
    std::size_t size() const noexcept { return rows_.size(); }
    /// Rows in key order.
    std::vector<const GroundTruthRow *> rows() const;

private:
    std::unordered_map<std::string, GroundTruthRow> rows_;
};

enum class EffectiveSource { GroundTruth, HistoricalModel, Unknown };

std::string_view to_string(EffectiveSource source) noexcept;

/// Estimate source names used in AuthorRecord::estimates.
inline constexpr std::string_view kTruthSource = "truth";
inline constexpr std::string_view kHistoricalSource = "ssa";

struct AuthorRecord {
    std::string person_key;
    std::string raw_name;
    std::string given_token;
    bool initials_only = false;
    std::optional<TruthLabel> ground_truth;
    std::optional<std::string> truth_evidence;
    std::map<std::string, GenderEstimate, std::less<>> estimates;
    /// Estimate used for population tabulation; Unknown until resolved.
    GenderEstimate effective;
    EffectiveSource effective_source = EffectiveSource::Unknown;
};

struct PopulationYear {
    int year = 0;
    /// Deduplicated by person_key, sorted by person_key.
    std::vector<AuthorRecord> authors;
    std::size_t article_count = 0;
    std::size_t mention_count = 0;
    /// Labeled (F, M or U-after-research) members over population size.
    double identified_fraction = 0.0;
    /// Sum of p(F) over members with a known effective estimate.
    double expected_women = 0.0;
    /// expected_women over the full population size.
    double women_pct = 0.0;
    bool resolved = false;

    const AuthorRecord *find(std::string_view person_key) const;
    std::size_t labeled_count() const;
};

/// Deduplicates the authors of `articles` (all of `year`) into one population.
/// For a person seen under several spellings the lexicographically smallest
/// raw name is kept, so the result does not depend on article order.
/// Throws std::invalid_argument when an article has a different year.
PopulationYear build_population(std::span<const ArticleRecord> articles, int year);

struct AttachReport {
    std::size_t matched = 0;
    /// Label rows with no member in the population, in key order.
    std::vector<std::string> unmatched_keys;
};

/// Attaches labels to matching members and recomputes identified_fraction.
AttachReport attach_ground_truth(PopulationYear &population, const GroundTruthTable &labels);

struct ResolveOptions {
    int offset = kDefaultBirthYearOffset;
    int window = kDefaultLookupWindow;
    TruthConstants truth;
};

/// Gives every member an effective estimate: ground truth for F/M labels, a
/// historical lookup at the assumed birth year for unlabeled members with a
/// usable given name, Unknown otherwise (U labels, unlabeled initials-only
/// names, names absent from the model). Members are never removed.
PopulationYear resolve_population_gender(PopulationYear population, const NameGenderTable &model,
                                         const ResolveOptions &options = {});

/// Recomputes expected_women and women_pct from member effective estimates.
void recompute_tabulation(PopulationYear &population);

}  // namespace cgaudit
