#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cgaudit/estimate.h"

namespace cgaudit {

enum class ParseMode { Lenient, Strict };

inline constexpr int kDefaultLookupWindow = 5;
inline constexpr int kDefaultBirthYearOffset = 30;
inline constexpr std::uint64_t kDefaultShiftMinSamples = 50;

struct SexCounts {
    std::uint64_t male = 0;
    std::uint64_t female = 0;

    std::uint64_t total() const noexcept { return male + female; }
    SexCounts &operator+=(const SexCounts &other) noexcept {
        male += other.male;
        female += other.female;
        return *this;
    }
    bool operator==(const SexCounts &) const = default;
};

/// One (name, year) row of the name-frequency data.
struct NameYearCount {
    std::string name;
    int year = 0;
    std::uint64_t male_count = 0;
    std::uint64_t female_count = 0;

    bool operator==(const NameYearCount &) const = default;
};

/// Raised for malformed input lines in strict mode.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string &what, std::size_t line)
        : std::runtime_error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct IngestTally {
    std::size_t records_added = 0;
    std::size_t lines_read = 0;
    std::size_t skipped = 0;
    std::size_t files = 0;
    /// First few skip diagnostics, "file:line: reason".
    std::vector<std::string> skip_notes;

    IngestTally &operator+=(const IngestTally &other);
};

/// Immutable (folded name, year) -> counts table. Safe for concurrent readers.
class NameGenderTable {
public:
    /// Counts for an already-folded key, or nullopt when absent.
    std::optional<SexCounts> counts(std::string_view folded_name, int year) const;
    bool contains(std::string_view folded_name) const;

    /// Summed counts over [year - radius, year + radius].
    SexCounts counts_in_radius(std::string_view folded_name, int year, int radius) const;

    bool empty() const noexcept { return names_.empty(); }
    int min_year() const;
    int max_year() const;
    const std::set<int> &years() const noexcept { return years_; }
    std::size_t name_count() const noexcept { return names_.size(); }
    std::size_t record_count() const noexcept { return record_count_; }

    /// Spelling of the first row ingested for this key.
    std::string_view display_name(std::string_view folded_name) const;

    /// All records ordered by (folded name, year).
    std::vector<NameYearCount> records() const;

    /// Folded keys in sorted order.
    std::vector<std::string> names() const;

private:
    friend class NameTableBuilder;

    struct Entry {
        std::string display;
        std::map<int, SexCounts> by_year;
    };
    const Entry *find(std::string_view folded_name) const;

    std::unordered_map<std::string, Entry> names_;
    std::set<int> years_;
    std::size_t record_count_ = 0;
};

/// Single-writer builder for NameGenderTable.
class NameTableBuilder {
public:
    /// Reads `Name,S,Count` lines (the yobYYYY.txt layout) for one year.
    /// Duplicate (name, sex) lines are summed. records_added counts new
    /// (name, year) keys.
    IngestTally ingest_name_year_file(std::istream &in, int year,
                                      ParseMode mode = ParseMode::Lenient,
                                      std::string_view source = "<stream>");

    /// Ingests every yobYYYY.txt under `dir` in year order.
    IngestTally ingest_directory(const std::filesystem::path &dir,
                                 ParseMode mode = ParseMode::Lenient);

    /// Reads the persisted `name,year,male,female` CSV written by write_model_csv.
    IngestTally ingest_model_csv(std::istream &in, ParseMode mode = ParseMode::Strict);

    /// Returns true when a new (name, year) record was created.
    bool add(std::string_view name, int year, SexCounts counts);

    NameGenderTable build() &&;

private:
    NameGenderTable table_;
};

void write_model_csv(const NameGenderTable &table, std::ostream &out);

/// Year-specific p(F). Looks at `birth_year` first, then widens the radius one
/// year at a time up to `window`, aggregating every year within the first
/// radius that has counts. Hyphenated tokens fall back to the segment before
/// the first hyphen. Absence yields an Unknown estimate.
GenderEstimate lookup_p_female(const NameGenderTable &table, std::string_view name,
                               int birth_year, int window = kDefaultLookupWindow);

/// Assumed birth year of an author publishing in `pub_year`.
/// Throws std::invalid_argument when offset < 1 or pub_year <= offset.
int birth_year_for_publication(int pub_year, int offset = kDefaultBirthYearOffset);

enum class ShiftDirection { TowardFemale, TowardMale, None };

std::string_view to_string(ShiftDirection direction) noexcept;

struct GenderShiftRecord {
    std::string name;
    int year_a = 0;
    int year_b = 0;
    double p_female_a = 0.0;
    double p_female_b = 0.0;
    std::uint64_t samples_a = 0;
    std::uint64_t samples_b = 0;
    bool crossed_majority = false;
    ShiftDirection direction = ShiftDirection::None;
};

/// True iff (a - 0.5) and (b - 0.5) have strictly opposite signs.
bool crosses_majority(double p_a, double p_b) noexcept;

/// Names with at least `min_samples` births around both years, sorted by
/// |p_b - p_a| descending (ties by name). Throws std::out_of_range when a
/// year lies outside the table's year range, std::invalid_argument when
/// min_samples < 1.
std::vector<GenderShiftRecord> detect_gender_shifts(const NameGenderTable &table, int year_a,
                                                    int year_b,
                                                    std::uint64_t min_samples = kDefaultShiftMinSamples,
                                                    int window = 0);

}  // namespace cgaudit
