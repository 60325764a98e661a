#include "cgaudit/name_model.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <string>

#include "cgaudit/csv.h"
#include "cgaudit/text.h"

namespace cgaudit {
namespace {

constexpr std::size_t kMaxSkipNotes = 20;

template <typename T>
bool parse_number(std::string_view text, T &value) {
    text = trim(text);
    if (text.empty()) return false;
    const auto *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    return ec == std::errc() && ptr == end;
}

void note_skip(IngestTally &tally, std::string_view source, std::size_t line,
               const std::string &reason) {
    ++tally.skipped;
    if (tally.skip_notes.size() < kMaxSkipNotes) {
        tally.skip_notes.push_back(std::string(source) + ":" + std::to_string(line) + ": " +
                                   reason);
    }
}

void reject(ParseMode mode, IngestTally &tally, std::string_view source, std::size_t line,
            const std::string &reason) {
    if (mode == ParseMode::Strict) {
        throw ParseError(std::string(source) + ":" + std::to_string(line) + ": " + reason, line);
    }
    note_skip(tally, source, line, reason);
}

}  // namespace

IngestTally &IngestTally::operator+=(const IngestTally &other) {
    records_added += other.records_added;
    lines_read += other.lines_read;
    skipped += other.skipped;
    files += other.files;
    for (const auto &note : other.skip_notes) {
        if (skip_notes.size() >= kMaxSkipNotes) break;
        skip_notes.push_back(note);
    }
    return *this;
}

// ---------------------------------------------------------------------------
// NameGenderTable

const NameGenderTable::Entry *NameGenderTable::find(std::string_view folded_name) const {
    auto it = names_.find(std::string(folded_name));
    return it == names_.end() ? nullptr : &it->second;
}

std::optional<SexCounts> NameGenderTable::counts(std::string_view folded_name, int year) const {
    const Entry *entry = find(folded_name);
    if (!entry) return std::nullopt;
    auto it = entry->by_year.find(year);
    if (it == entry->by_year.end()) return std::nullopt;
    return it->second;
}

bool NameGenderTable::contains(std::string_view folded_name) const {
    return find(folded_name) != nullptr;
}

SexCounts NameGenderTable::counts_in_radius(std::string_view folded_name, int year,
                                            int radius) const {
    SexCounts sum;
    const Entry *entry = find(folded_name);
    if (!entry) return sum;
    auto it = entry->by_year.lower_bound(year - radius);
    for (; it != entry->by_year.end() && it->first <= year + radius; ++it) sum += it->second;
    return sum;
}

int NameGenderTable::min_year() const {
    if (years_.empty()) throw std::out_of_range("name table is empty");
    return *years_.begin();
}

int NameGenderTable::max_year() const {
    if (years_.empty()) throw std::out_of_range("name table is empty");
    return *years_.rbegin();
}

std::string_view NameGenderTable::display_name(std::string_view folded_name) const {
    const Entry *entry = find(folded_name);
    return entry ? std::string_view(entry->display) : std::string_view();
}

std::vector<std::string> NameGenderTable::names() const {
    std::vector<std::string> keys;
    keys.reserve(names_.size());
    for (const auto &[key, entry] : names_) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    return keys;
}

std::vector<NameYearCount> NameGenderTable::records() const {
    std::vector<NameYearCount> out;
    out.reserve(record_count_);
    for (const auto &key : names()) {
        const Entry &entry = names_.at(key);
        for (const auto &[year, c] : entry.by_year) {
            out.push_back(NameYearCount{key, year, c.male, c.female});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// NameTableBuilder

bool NameTableBuilder::add(std::string_view name, int year, SexCounts counts) {
    std::string key = fold_name(name);
    if (key.empty()) throw std::invalid_argument("empty name");
    if (counts.total() == 0) throw std::invalid_argument("record with zero births");
    auto [it, inserted_name] = table_.names_.try_emplace(std::move(key));
    if (inserted_name) it->second.display = std::string(trim(name));
    auto [yit, inserted_year] = it->second.by_year.try_emplace(year);
    yit->second += counts;
    table_.years_.insert(year);
    if (inserted_year) ++table_.record_count_;
    return inserted_year;
}

IngestTally NameTableBuilder::ingest_name_year_file(std::istream &in, int year, ParseMode mode,
                                                    std::string_view source) {
    IngestTally tally;
    tally.files = 1;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        ++tally.lines_read;
        std::string_view view = trim(line);
        if (view.empty()) continue;

        const auto c1 = view.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : view.find(',', c1 + 1);
        if (c2 == std::string_view::npos || view.find(',', c2 + 1) != std::string_view::npos) {
            reject(mode, tally, source, line_no, "expected Name,S,Count");
            continue;
        }
        const std::string_view name = trim(view.substr(0, c1));
        const std::string_view sex = trim(view.substr(c1 + 1, c2 - c1 - 1));
        std::uint64_t count = 0;
        if (name.empty()) {
            reject(mode, tally, source, line_no, "empty name");
            continue;
        }
        if (!parse_number(view.substr(c2 + 1), count) || count < 1) {
            reject(mode, tally, source, line_no, "count must be a positive integer");
            continue;
        }
        SexCounts counts;
        if (sex == "F") {
            counts.female = count;
        } else if (sex == "M") {
            counts.male = count;
        } else {
            reject(mode, tally, source, line_no, "unknown sex code '" + std::string(sex) + "'");
            continue;
        }
        if (add(name, year, counts)) ++tally.records_added;
    }
    return tally;
}

IngestTally NameTableBuilder::ingest_directory(const std::filesystem::path &dir, ParseMode mode) {
    if (!std::filesystem::is_directory(dir)) {
        throw std::runtime_error("not a directory: " + dir.string());
    }
    static const std::regex kYobFile(R"(yob(\d{4})\.txt)");
    std::vector<std::pair<int, std::filesystem::path>> files;
    for (const auto &entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string filename = entry.path().filename().string();
        std::smatch match;
        if (std::regex_match(filename, match, kYobFile)) {
            files.emplace_back(std::stoi(match[1].str()), entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    IngestTally total;
    for (const auto &[year, path] : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + path.string());
        total += ingest_name_year_file(in, year, mode, path.filename().string());
    }
    return total;
}

IngestTally NameTableBuilder::ingest_model_csv(std::istream &in, ParseMode mode) {
    IngestTally tally;
    tally.files = 1;
    csv::Reader reader(in);
    bool header = true;
    while (auto row = reader.next()) {
        ++tally.lines_read;
        if (header) {
            header = false;
            if (!row->empty() && (*row)[0] == "name") continue;
        }
        if (row->size() == 1 && trim((*row)[0]).empty()) continue;
        int year = 0;
        std::uint64_t male = 0;
        std::uint64_t female = 0;
        if (row->size() != 4 || !parse_number((*row)[1], year) || !parse_number((*row)[2], male) ||
            !parse_number((*row)[3], female) || male + female == 0 || trim((*row)[0]).empty()) {
            reject(mode, tally, "model", reader.record_line(), "expected name,year,male,female");
            continue;
        }
        if (add((*row)[0], year, SexCounts{male, female})) ++tally.records_added;
    }
    return tally;
}

NameGenderTable NameTableBuilder::build() && { return std::move(table_); }

void write_model_csv(const NameGenderTable &table, std::ostream &out) {
    csv::write_row(out, {"name", "year", "male", "female"});
    for (const auto &r : table.records()) {
        csv::write_row(out, {std::string(table.display_name(r.name)), std::to_string(r.year),
                             std::to_string(r.male_count), std::to_string(r.female_count)});
    }
}

// ---------------------------------------------------------------------------
// Queries

namespace {

std::optional<GenderEstimate> windowed_lookup(const NameGenderTable &table, std::string_view key,
                                              int birth_year, int window) {
    if (!table.contains(key)) return std::nullopt;
    for (int radius = 0; radius <= window; ++radius) {
        const SexCounts c = table.counts_in_radius(key, birth_year, radius);
        if (c.total() > 0) {
            const double p = static_cast<double>(c.female) / static_cast<double>(c.total());
            return GenderEstimate::historical(p, c.total(), birth_year, radius);
        }
    }
    return std::nullopt;
}

}  // namespace

GenderEstimate lookup_p_female(const NameGenderTable &table, std::string_view name,
                               int birth_year, int window) {
    if (window < 0) throw std::invalid_argument("window must be nonnegative");
    const std::string key = fold_name(name);
    if (key.empty()) return GenderEstimate::unknown(birth_year);
    if (auto hit = windowed_lookup(table, key, birth_year, window)) return *hit;
    const auto hyphen = key.find('-');
    if (hyphen != std::string::npos && hyphen > 0) {
        if (auto hit = windowed_lookup(table, key.substr(0, hyphen), birth_year, window)) {
            return *hit;
        }
    }
    return GenderEstimate::unknown(birth_year);
}

int birth_year_for_publication(int pub_year, int offset) {
    if (offset < 1) throw std::invalid_argument("birth-year offset must be positive");
    if (pub_year <= offset) {
        throw std::invalid_argument("publication year " + std::to_string(pub_year) +
                                    " is not after the offset " + std::to_string(offset));
    }
    return pub_year - offset;
}

std::string_view to_string(ShiftDirection direction) noexcept {
    switch (direction) {
    case ShiftDirection::TowardFemale: return "toward_female";
    case ShiftDirection::TowardMale: return "toward_male";
    case ShiftDirection::None: return "none";
    }
    return "none";
}

bool crosses_majority(double p_a, double p_b) noexcept {
    const double a = p_a - 0.5;
    const double b = p_b - 0.5;
    return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0);
}

std::vector<GenderShiftRecord> detect_gender_shifts(const NameGenderTable &table, int year_a,
                                                    int year_b, std::uint64_t min_samples,
                                                    int window) {
    if (min_samples < 1) throw std::invalid_argument("min_samples must be at least 1");
    if (window < 0) throw std::invalid_argument("window must be nonnegative");
    if (table.empty()) throw std::out_of_range("name table is empty");
    for (int year : {year_a, year_b}) {
        if (year < table.min_year() || year > table.max_year()) {
            throw std::out_of_range("year " + std::to_string(year) + " outside table range " +
                                    std::to_string(table.min_year()) + "-" +
                                    std::to_string(table.max_year()));
        }
    }

    std::vector<GenderShiftRecord> shifts;
    for (const auto &key : table.names()) {
        const SexCounts a = table.counts_in_radius(key, year_a, window);
        const SexCounts b = table.counts_in_radius(key, year_b, window);
        if (a.total() < min_samples || b.total() < min_samples) continue;
        GenderShiftRecord r;
        r.name = std::string(table.display_name(key));
        r.year_a = year_a;
        r.year_b = year_b;
        r.samples_a = a.total();
        r.samples_b = b.total();
        r.p_female_a = static_cast<double>(a.female) / static_cast<double>(a.total());
        r.p_female_b = static_cast<double>(b.female) / static_cast<double>(b.total());
        r.crossed_majority = crosses_majority(r.p_female_a, r.p_female_b);
        if (r.p_female_b > r.p_female_a) {
            r.direction = ShiftDirection::TowardFemale;
        } else if (r.p_female_b < r.p_female_a) {
            r.direction = ShiftDirection::TowardMale;
        }
        shifts.push_back(std::move(r));
    }
    std::sort(shifts.begin(), shifts.end(), [](const auto &x, const auto &y) {
        const double dx = std::abs(x.p_female_b - x.p_female_a);
        const double dy = std::abs(y.p_female_b - y.p_female_a);
        if (dx != dy) return dx > dy;
        return x.name < y.name;
    });
    return shifts;
}

}  // namespace cgaudit
