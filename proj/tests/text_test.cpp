#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "cgaudit/csv.h"
#include "cgaudit/text.h"

using namespace cgaudit;

TEST(FoldName, StripsDiacriticsAndCase) {
    EXPECT_EQ(fold_name("Rózsa"), "rozsa");
    EXPECT_EQ(fold_name("LESLIE "), "leslie");
    EXPECT_EQ(fold_name("  Péter   Rózsa "), "peter rozsa");
    EXPECT_EQ(fold_name("Łukasiewicz"), "lukasiewicz");
    EXPECT_EQ(fold_name("Jose\xCC\x81"), "jose");  // combining acute
    EXPECT_EQ(fold_name(""), "");
}

TEST(FoldName, InvalidBytesBecomeReplacementCharacter) {
    const std::string folded = fold_name("ab\xFF" "c");
    EXPECT_EQ(folded, "ab\xEF\xBF\xBD" "c");
    EXPECT_EQ(fold_name(std::string("x\xC3")), "x\xEF\xBF\xBD");
}

TEST(FoldName, IdempotentOnRandomInput) {
    std::mt19937_64 rng(7);
    const std::string alphabet[] = {"a", "B", " ", "\t", "é", "Ö", "ß", "\xFF", "-", ".", "ł", "\xCC\x88"};
    for (int round = 0; round < 2000; ++round) {
        std::string s;
        const int len = static_cast<int>(rng() % 12);
        for (int i = 0; i < len; ++i) s += alphabet[rng() % std::size(alphabet)];
        const std::string once = fold_name(s);
        EXPECT_EQ(fold_name(once), once) << "input: " << s;
    }
}

TEST(GivenToken, DblpStyleNames) {
    auto florence = extract_given_token("Florence Jessie MacWilliams");
    EXPECT_EQ(florence.token, "Florence");
    EXPECT_FALSE(florence.initials_only);

    auto woodger = extract_given_token("J. H. Woodger");
    EXPECT_EQ(woodger.token, "J");
    EXPECT_TRUE(woodger.initials_only);

    auto noam = extract_given_token("Noam Chomsky");
    EXPECT_EQ(noam.token, "Noam");
    EXPECT_FALSE(noam.initials_only);
}

TEST(GivenToken, EdgeCases) {
    EXPECT_THROW(extract_given_token(""), std::invalid_argument);
    EXPECT_THROW(extract_given_token("   "), std::invalid_argument);

    // A middle initial does not make the name initials-only.
    EXPECT_FALSE(extract_given_token("Love H. Seawright").initials_only);
    EXPECT_TRUE(extract_given_token("J.-P. Serre").initials_only);
    EXPECT_EQ(extract_given_token("J.-P. Serre").token, "J.-P");

    // Numeric disambiguation suffixes are ignored.
    auto wang = extract_given_token("Wei Wang 0001");
    EXPECT_EQ(wang.token, "Wei");
    EXPECT_FALSE(wang.initials_only);

    auto single = extract_given_token("Plato");
    EXPECT_EQ(single.token, "Plato");
    EXPECT_FALSE(single.initials_only);
    EXPECT_TRUE(extract_given_token("J.").initials_only);
}

TEST(InitialToken, Classification) {
    EXPECT_TRUE(is_initial_token("J."));
    EXPECT_TRUE(is_initial_token("J"));
    EXPECT_TRUE(is_initial_token("J.H."));
    EXPECT_TRUE(is_initial_token("Ö."));
    EXPECT_FALSE(is_initial_token("Jo"));
    EXPECT_FALSE(is_initial_token(""));
    EXPECT_FALSE(is_initial_token("1."));
}

TEST(Csv, RoundTripsAwkwardFields) {
    const std::vector<std::vector<std::string>> rows = {
        {"plain", "with,comma", "with \"quote\""},
        {"multi\nline", "", "trailing "},
        {"Rózsa Péter", "a\r\nb", ","},
    };
    std::ostringstream out;
    for (const auto &row : rows) csv::write_row(out, row);

    std::istringstream in(out.str());
    csv::Reader reader(in);
    for (const auto &row : rows) {
        auto read = reader.next();
        ASSERT_TRUE(read);
        EXPECT_EQ(*read, row);
    }
    EXPECT_FALSE(reader.next());
}

TEST(Csv, ReportsRecordLinesAndUnterminatedQuotes) {
    std::istringstream in("a,b\n\"x\ny\",z\nlast,row\n");
    csv::Reader reader(in);
    ASSERT_TRUE(reader.next());
    EXPECT_EQ(reader.record_line(), 1u);
    ASSERT_TRUE(reader.next());
    EXPECT_EQ(reader.record_line(), 2u);
    ASSERT_TRUE(reader.next());
    EXPECT_EQ(reader.record_line(), 4u);

    std::istringstream bad("\"open,field\n");
    csv::Reader broken(bad);
    EXPECT_THROW(broken.next(), std::runtime_error);
}
