#include "cgaudit/population.h"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "cgaudit/csv.h"
#include "cgaudit/text.h"

namespace cgaudit {

std::string_view to_string(TruthLabel label) noexcept {
    switch (label) {
    case TruthLabel::Female: return "female";
    case TruthLabel::Male: return "male";
    case TruthLabel::UnknownAfterResearch: return "unknown_after_research";
    }
    return "unknown_after_research";
}

std::string_view label_code(TruthLabel label) noexcept {
    switch (label) {
    case TruthLabel::Female: return "F";
    case TruthLabel::Male: return "M";
    case TruthLabel::UnknownAfterResearch: return "U";
    }
    return "U";
}

std::string_view to_string(EffectiveSource source) noexcept {
    switch (source) {
    case EffectiveSource::GroundTruth: return "ground_truth";
    case EffectiveSource::HistoricalModel: return "historical";
    case EffectiveSource::Unknown: return "unknown";
    }
    return "unknown";
}

std::string person_key_for(const AuthorMention &mention) {
    if (!mention.person_id.empty()) return "pid:" + std::string(trim(mention.person_id));
    return fold_name(mention.name);
}

std::string normalize_person_key(std::string_view key) {
    key = trim(key);
    if (key.starts_with("pid:")) return "pid:" + std::string(trim(key.substr(4)));
    return fold_name(key);
}

// ---------------------------------------------------------------------------
// GroundTruthTable

void GroundTruthTable::add(GroundTruthRow row) {
    row.person_key = normalize_person_key(row.person_key);
    if (row.person_key.empty()) {
        throw std::runtime_error("label row on line " + std::to_string(row.line) +
                                 ": empty person_key");
    }
    auto [it, inserted] = rows_.try_emplace(row.person_key, row);
    if (!inserted && it->second.label != row.label) {
        throw std::runtime_error("label row on line " + std::to_string(row.line) + ": person '" +
                                 row.person_key + "' already labeled " +
                                 std::string(label_code(it->second.label)) + " on line " +
                                 std::to_string(it->second.line));
    }
}

std::size_t GroundTruthTable::ingest(std::istream &in) {
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header) return 0;
    const std::vector<std::string> expected{"person_key", "raw_name", "label", "evidence"};
    if (header->size() < 3) {
        throw std::runtime_error("label file header must be person_key,raw_name,label,evidence");
    }
    for (std::size_t i = 0; i < header->size() && i < expected.size(); ++i) {
        if (trim((*header)[i]) != expected[i]) {
            throw std::runtime_error("label file header must be person_key,raw_name,label,evidence");
        }
    }

    const std::size_t before = rows_.size();
    while (auto fields = reader.next()) {
        const std::size_t line = reader.record_line();
        if (fields->size() == 1 && trim((*fields)[0]).empty()) continue;
        if (fields->size() < 3 || fields->size() > 4) {
            throw std::runtime_error("label row on line " + std::to_string(line) +
                                     ": expected 4 fields, got " + std::to_string(fields->size()));
        }
        GroundTruthRow row;
        row.person_key = (*fields)[0];
        row.raw_name = std::string(trim((*fields)[1]));
        row.line = line;
        const std::string_view code = trim((*fields)[2]);
        if (code == "F") {
            row.label = TruthLabel::Female;
        } else if (code == "M") {
            row.label = TruthLabel::Male;
        } else if (code == "U") {
            row.label = TruthLabel::UnknownAfterResearch;
        } else {
            throw std::runtime_error("label row on line " + std::to_string(line) +
                                     ": unknown label '" + std::string(code) +
                                     "' (expected F, M or U)");
        }
        if (fields->size() == 4) row.evidence = std::string(trim((*fields)[3]));
        add(std::move(row));
    }
    return rows_.size() - before;
}

const GroundTruthRow *GroundTruthTable::find(std::string_view person_key) const {
    auto it = rows_.find(std::string(person_key));
    return it == rows_.end() ? nullptr : &it->second;
}

std::vector<const GroundTruthRow *> GroundTruthTable::rows() const {
    std::vector<const GroundTruthRow *> out;
    out.reserve(rows_.size());
    for (const auto &[key, row] : rows_) out.push_back(&row);
    std::sort(out.begin(), out.end(),
              [](const auto *a, const auto *b) { return a->person_key < b->person_key; });
    return out;
}

// ---------------------------------------------------------------------------
// PopulationYear

const AuthorRecord *PopulationYear::find(std::string_view person_key) const {
    auto it = std::lower_bound(authors.begin(), authors.end(), person_key,
                               [](const AuthorRecord &a, std::string_view key) {
                                   return a.person_key < key;
                               });
    return it != authors.end() && it->person_key == person_key ? &*it : nullptr;
}

std::size_t PopulationYear::labeled_count() const {
    return static_cast<std::size_t>(std::count_if(
        authors.begin(), authors.end(), [](const auto &a) { return a.ground_truth.has_value(); }));
}

PopulationYear build_population(std::span<const ArticleRecord> articles, int year) {
    PopulationYear pop;
    pop.year = year;
    std::map<std::string, std::string> names;  // person_key -> smallest raw name
    for (const auto &article : articles) {
        if (article.year != year) {
            throw std::invalid_argument("article " + article.corpus_key + " is from " +
                                        std::to_string(article.year) + ", not " +
                                        std::to_string(year));
        }
        ++pop.article_count;
        for (const auto &mention : article.authors) {
            if (trim(mention.name).empty()) continue;
            ++pop.mention_count;
            std::string key = person_key_for(mention);
            auto [it, inserted] = names.try_emplace(std::move(key), mention.name);
            if (!inserted && mention.name < it->second) it->second = mention.name;
        }
    }
    pop.authors.reserve(names.size());
    for (auto &[key, raw] : names) {
        AuthorRecord author;
        author.person_key = key;
        const GivenToken given = extract_given_token(raw);
        author.given_token = given.token;
        author.initials_only = given.initials_only;
        author.raw_name = std::move(raw);
        pop.authors.push_back(std::move(author));
    }
    return pop;
}

AttachReport attach_ground_truth(PopulationYear &population, const GroundTruthTable &labels) {
    AttachReport report;
    for (auto &author : population.authors) {
        if (const GroundTruthRow *row = labels.find(author.person_key)) {
            author.ground_truth = row->label;
            author.truth_evidence = row->evidence;
            ++report.matched;
        }
    }
    for (const auto *row : labels.rows()) {
        if (!population.find(row->person_key)) report.unmatched_keys.push_back(row->person_key);
    }
    population.identified_fraction =
        population.authors.empty()
            ? 0.0
            : static_cast<double>(population.labeled_count()) /
                  static_cast<double>(population.authors.size());
    return report;
}

void recompute_tabulation(PopulationYear &population) {
    double expected = 0.0;
    for (const auto &author : population.authors) {
        if (author.effective.known()) expected += author.effective.p_female();
    }
    population.expected_women = expected;
    population.women_pct = population.authors.empty()
                               ? 0.0
                               : expected / static_cast<double>(population.authors.size());
}

PopulationYear resolve_population_gender(PopulationYear population, const NameGenderTable &model,
                                         const ResolveOptions &options) {
    const int birth_year = birth_year_for_publication(population.year, options.offset);
    for (auto &author : population.authors) {
        author.estimates.erase(std::string(kTruthSource));
        author.estimates.erase(std::string(kHistoricalSource));

        if (author.ground_truth == TruthLabel::Female || author.ground_truth == TruthLabel::Male) {
            const double p = author.ground_truth == TruthLabel::Female ? options.truth.female
                                                                       : options.truth.male;
            author.effective = GenderEstimate::ground_truth(p);
            author.effective_source = EffectiveSource::GroundTruth;
            author.estimates.emplace(std::string(kTruthSource), author.effective);
        } else if (!author.ground_truth && !author.initials_only && !author.given_token.empty()) {
            GenderEstimate estimate =
                lookup_p_female(model, author.given_token, birth_year, options.window);
            author.effective_source = estimate.known() ? EffectiveSource::HistoricalModel
                                                       : EffectiveSource::Unknown;
            author.effective = estimate;
            author.estimates.emplace(std::string(kHistoricalSource), std::move(estimate));
        } else {
            author.effective = GenderEstimate::unknown(birth_year);
            author.effective_source = EffectiveSource::Unknown;
        }
    }
    recompute_tabulation(population);
    population.resolved = true;
    return population;
}

}  // namespace cgaudit
