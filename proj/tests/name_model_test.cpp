#include <gtest/gtest.h>

#include <sstream>

#include "cgaudit/name_model.h"
#include "test_support.h"

using namespace cgaudit;

namespace {

NameGenderTable table_from(const std::vector<std::pair<int, std::string>> &files) {
    NameTableBuilder builder;
    for (const auto &[year, text] : files) {
        std::istringstream in(text);
        builder.ingest_name_year_file(in, year, ParseMode::Strict);
    }
    return std::move(builder).build();
}

const NameGenderTable &bundled() {
    static const NameGenderTable table = [] {
        NameTableBuilder builder;
        builder.ingest_directory(test::data_dir() / "ssa", ParseMode::Strict);
        return std::move(builder).build();
    }();
    return table;
}

}  // namespace

TEST(IngestNameYear, SingleSexRow) {
    NameTableBuilder builder;
    std::istringstream in("Mary,F,7065\n");
    const auto tally = builder.ingest_name_year_file(in, 1880);
    EXPECT_EQ(tally.records_added, 1u);
    const auto table = std::move(builder).build();
    const auto counts = table.counts("mary", 1880);
    ASSERT_TRUE(counts);
    EXPECT_EQ(counts->male, 0u);
    EXPECT_EQ(counts->female, 7065u);
}

TEST(IngestNameYear, MergesBothSexes) {
    NameTableBuilder builder;
    std::istringstream in("Leslie,M,1500\nLeslie,F,1500\n");
    EXPECT_EQ(builder.ingest_name_year_file(in, 1950).records_added, 1u);
    const auto table = std::move(builder).build();
    EXPECT_EQ(table.counts("leslie", 1950), (SexCounts{1500, 1500}));
    EXPECT_EQ(table.record_count(), 1u);
}

TEST(IngestNameYear, EmptyStream) {
    NameTableBuilder builder;
    std::istringstream in("");
    EXPECT_EQ(builder.ingest_name_year_file(in, 1900).records_added, 0u);
}

TEST(IngestNameYear, MalformedLinesFollowPolicy) {
    const std::string text = "Anna,F,10\nbroken line\nBob,X,5\nCarl,M,-3\nDora,F,7\n";
    {
        NameTableBuilder builder;
        std::istringstream in(text);
        const auto tally = builder.ingest_name_year_file(in, 1920, ParseMode::Lenient, "t.txt");
        EXPECT_EQ(tally.records_added, 2u);
        EXPECT_EQ(tally.skipped, 3u);
        ASSERT_FALSE(tally.skip_notes.empty());
        EXPECT_NE(tally.skip_notes.front().find("t.txt:2"), std::string::npos);
    }
    {
        NameTableBuilder builder;
        std::istringstream in(text);
        try {
            builder.ingest_name_year_file(in, 1920, ParseMode::Strict, "t.txt");
            FAIL() << "strict mode accepted a malformed line";
        } catch (const ParseError &e) {
            EXPECT_EQ(e.line(), 2u);
        }
    }
}

TEST(IngestNameYear, DirectoryAndModelCsvRoundTrip) {
    test::TempDir dir;
    test::write_file(dir / "yob1900.txt", "Leslie,F,80\nLeslie,M,920\n");
    test::write_file(dir / "yob1950.txt", "Leslie,F,52\nLeslie,M,48\nMary,F,10\n");
    test::write_file(dir / "yob2000.txt", "Leslie,F,96\nLeslie,M,4\n");
    test::write_file(dir / "readme.txt", "not a year file\n");

    NameTableBuilder builder;
    const auto tally = builder.ingest_directory(dir.path());
    EXPECT_EQ(tally.files, 3u);
    const auto table = std::move(builder).build();
    EXPECT_EQ(table.years().size(), 3u);
    EXPECT_EQ(table.name_count(), 2u);

    std::ostringstream out;
    write_model_csv(table, out);
    NameTableBuilder again;
    std::istringstream in(out.str());
    again.ingest_model_csv(in);
    const auto copy = std::move(again).build();
    EXPECT_EQ(copy.records(), table.records());
    EXPECT_EQ(copy.display_name("leslie"), "Leslie");
}

TEST(Lookup, LeslieAcrossTheCentury) {
    const auto &table = bundled();
    const auto p1900 = lookup_p_female(table, "Leslie", 1900);
    const auto p1950 = lookup_p_female(table, "Leslie", 1950);
    const auto p2000 = lookup_p_female(table, "Leslie", 2000);
    EXPECT_EQ(p1900.p_female(), 80.0 / 1000.0);
    EXPECT_EQ(p1950.p_female(), 2600.0 / 5000.0);
    EXPECT_GE(p2000.p_female(), 0.96);
    EXPECT_EQ(p1900.method(), EstimateMethod::HistoricalModel);
    EXPECT_EQ(p1900.window_radius(), 0);
}

TEST(Lookup, ChrisInNineteenForty) {
    EXPECT_DOUBLE_EQ(lookup_p_female(bundled(), "Chris", 1940).p_female(), 0.09);
}

TEST(Lookup, AbsentNameIsUnknown) {
    const auto estimate = lookup_p_female(bundled(), "Zebulon", 1950);
    EXPECT_FALSE(estimate.known());
    EXPECT_EQ(estimate.method(), EstimateMethod::Unknown);
    EXPECT_THROW((void)estimate.p_female(), std::logic_error);
}

TEST(Lookup, WindowWidensToNearestYears) {
    const auto table = table_from({{1948, "Ada,F,30\nAda,M,10\n"}, {1953, "Ada,F,10\nAda,M,10\n"}});
    EXPECT_FALSE(lookup_p_female(table, "Ada", 1950, 1).known());
    const auto two = lookup_p_female(table, "Ada", 1950, 2);
    EXPECT_EQ(two.window_radius(), 2);
    EXPECT_DOUBLE_EQ(two.p_female(), 0.75);
    // At radius 3 both years are pooled, but radius 2 already answers.
    EXPECT_DOUBLE_EQ(lookup_p_female(table, "Ada", 1950, 5).p_female(), 0.75);
    EXPECT_DOUBLE_EQ(lookup_p_female(table, "Ada", 1950, 5).sample_size(), 40);
}

TEST(Lookup, HyphenatedNameFallsBackToFirstPart) {
    const auto table = table_from({{1950, "Jean,M,90\nJean,F,10\n"}});
    EXPECT_DOUBLE_EQ(lookup_p_female(table, "Jean-Pierre", 1950).p_female(), 0.1);
}

TEST(BirthYear, Offsets) {
    EXPECT_EQ(birth_year_for_publication(1953), 1923);
    EXPECT_EQ(birth_year_for_publication(1980, 30), 1950);
    EXPECT_EQ(birth_year_for_publication(1910, 30), 1880);
    EXPECT_THROW(birth_year_for_publication(30, 30), std::invalid_argument);
    EXPECT_THROW(birth_year_for_publication(1950, 0), std::invalid_argument);
}

TEST(Shifts, LeslieCrossesMajority) {
    const auto shifts = detect_gender_shifts(bundled(), 1900, 2000);
    const auto crossed = std::count_if(shifts.begin(), shifts.end(),
                                       [](const GenderShiftRecord &s) { return s.crossed_majority; });
    EXPECT_EQ(crossed, 1);
    ASSERT_FALSE(shifts.empty());
    EXPECT_EQ(shifts.front().name, "Leslie");
    EXPECT_TRUE(shifts.front().crossed_majority);
    EXPECT_EQ(shifts.front().direction, ShiftDirection::TowardFemale);
    EXPECT_DOUBLE_EQ(shifts.front().p_female_a, 0.08);
    EXPECT_DOUBLE_EQ(shifts.front().p_female_b, 0.96);
}

TEST(Shifts, MaryStaysFemale) {
    const auto shifts = detect_gender_shifts(bundled(), 1900, 2000);
    auto mary = std::find_if(shifts.begin(), shifts.end(),
                             [](const GenderShiftRecord &s) { return s.name == "Mary"; });
    ASSERT_NE(mary, shifts.end());
    EXPECT_FALSE(mary->crossed_majority);
    EXPECT_EQ(mary->direction, ShiftDirection::None);
}

TEST(Shifts, JanTurnsMale) {
    const auto shifts = detect_gender_shifts(bundled(), 1965, 2005);
    auto jan = std::find_if(shifts.begin(), shifts.end(),
                            [](const GenderShiftRecord &s) { return s.name == "Jan"; });
    ASSERT_NE(jan, shifts.end());
    EXPECT_DOUBLE_EQ(jan->p_female_a, 0.8);
    EXPECT_DOUBLE_EQ(jan->p_female_b, 0.4);
    EXPECT_TRUE(jan->crossed_majority);
    EXPECT_EQ(jan->direction, ShiftDirection::TowardMale);
}

TEST(Shifts, IdenticalYearsAndHighFloor) {
    const auto same = detect_gender_shifts(bundled(), 1950, 1950);
    EXPECT_FALSE(same.empty());
    for (const auto &s : same) EXPECT_FALSE(s.crossed_majority);
    EXPECT_TRUE(detect_gender_shifts(bundled(), 1900, 2000, 1'000'000'000).empty());
    EXPECT_THROW(detect_gender_shifts(bundled(), 1850, 2000), std::out_of_range);
    EXPECT_THROW(detect_gender_shifts(bundled(), 1900, 2050), std::out_of_range);
}

TEST(Shifts, CrossesMajorityIsStrict) {
    EXPECT_TRUE(crosses_majority(0.49, 0.51));
    EXPECT_FALSE(crosses_majority(0.5, 0.9));
    EXPECT_FALSE(crosses_majority(0.2, 0.4));
}
