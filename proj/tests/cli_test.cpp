#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>

#include "cgaudit/mock_server.h"
#include "test_support.h"

using namespace cgaudit;

namespace {

struct Run {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string quote(const std::string &s) { return "'" + s + "'"; }

// Runs the CLI from the repository root so the bundled config's relative paths resolve.
Run cli(const std::string &args, const test::TempDir &scratch, const std::string &env = "") {
    const auto err_path = scratch / "stderr.txt";
    const std::string command = "cd " + quote(test::data_dir().parent_path().string()) + " && " + env +
                                quote(CGAUDIT_CLI_PATH) + " " + args + " 2>" +
                                quote(err_path.string());
    Run run;
    FILE *pipe = ::popen(command.c_str(), "r");
    if (!pipe) return run;
    char buffer[4096];
    std::size_t n;
    while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) run.out.append(buffer, n);
    const int status = ::pclose(pipe);
    run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    run.err = test::read_file(err_path);
    return run;
}

bool contains(const std::string &haystack, const std::string &needle) {
    return haystack.find(needle) != std::string::npos;
}

const char *kAuditFiles[] = {"table1.csv", "table2.csv", "table3.csv", "table4.csv",
                             "summary.json", "figure1.svg", "figure1.csv"};

}  // namespace

TEST(Cli, IngestSsaReportsYearsAndNames) {
    test::TempDir dir;
    test::write_file(dir / "ssa/yob1950.txt", "Leslie,F,2600\nLeslie,M,2400\nMary,F,100\n");
    test::write_file(dir / "ssa/yob1951.txt", "Leslie,F,10\nJohn,M,100\n");
    test::write_file(dir / "ssa/yob1952.txt", "Ann,F,5\nbroken line\n");
    const auto run = cli("ingest-ssa --ssa-dir " + quote((dir / "ssa").string()) + " --out " +
                             quote((dir / "out").string()),
                         dir);
    EXPECT_EQ(run.exit_code, 0) << run.err;
    EXPECT_TRUE(contains(run.out, "3 years, 4 names")) << run.out;
    EXPECT_TRUE(contains(run.out, "1 skipped")) << run.out;
    EXPECT_TRUE(std::filesystem::exists(dir / "out/name_model.csv"));
}

TEST(Cli, MalformedCorpusRecordLenientAndStrict) {
    test::TempDir dir;
    test::write_file(dir / "c.xml",
                     "<?xml version=\"1.0\"?>\n<dblp>\n"
                     "<article key=\"a/1\"><author>Ada Byron</author><title>T</title><year>1960</year><journal>J</journal></article>\n"
                     "<article key=\"a/2\"><author>No Year</author><title>T</title><journal>J</journal></article>\n"
                     "</dblp>\n");
    const std::string args = "ingest-corpus --corpus " + quote((dir / "c.xml").string()) +
                             " --years 1950-1980 --out " + quote((dir / "out").string());
    const auto lenient = cli(args, dir);
    EXPECT_EQ(lenient.exit_code, 0) << lenient.err;
    EXPECT_TRUE(contains(lenient.out, "1 skipped")) << lenient.out;

    const auto strict = cli(args + " --strict", dir);
    EXPECT_NE(strict.exit_code, 0);
    EXPECT_TRUE(contains(strict.err, "failed")) << strict.err;
}

TEST(Cli, AuditWritesArtifactsDeterministically) {
    test::TempDir dir;
    const auto a = cli("audit --config data/audit.conf --out " + quote((dir / "a").string()), dir);
    ASSERT_EQ(a.exit_code, 0) << a.err;
    EXPECT_TRUE(contains(a.out, "config ")) << a.out;
    const auto b = cli("--config data/audit.conf audit --out " + quote((dir / "b").string()), dir);
    ASSERT_EQ(b.exit_code, 0) << b.err;
    for (const char *file : kAuditFiles) {
        ASSERT_TRUE(std::filesystem::exists(dir / "a" / file)) << file;
        EXPECT_EQ(test::read_file(dir / "a" / file), test::read_file(dir / "b" / file)) << file;
    }
}

TEST(Cli, SummaryMatchesSchema) {
    if (std::system("python3 -c 'import jsonschema' >/dev/null 2>&1") != 0) {
        GTEST_SKIP() << "python3 jsonschema not available";
    }
    test::TempDir dir;
    const auto run = cli("audit --config data/audit.conf --out " + quote((dir / "out").string()), dir);
    ASSERT_EQ(run.exit_code, 0) << run.err;
    const std::string check =
        "python3 -c 'import json,sys,jsonschema; "
        "jsonschema.validate(json.load(open(sys.argv[2])), json.load(open(sys.argv[1])))' " +
        quote((test::schema_dir() / "summary.schema.json").string()) + " " +
        quote((dir / "out/summary.json").string());
    EXPECT_EQ(std::system(check.c_str()), 0);
}

TEST(Cli, ShiftsFindsLeslie) {
    test::TempDir dir;
    const auto run = cli("shifts --ssa-dir data/ssa --year-a 1900 --year-b 2000 --min-samples 50 --out " +
                             quote(dir.path().string()),
                         dir);
    ASSERT_EQ(run.exit_code, 0) << run.err;
    EXPECT_TRUE(contains(run.out, "crossed majority")) << run.out;
    const auto table = test::read_file(dir / "shifts.csv");
    EXPECT_TRUE(contains(table, ",Leslie,1900,2000,0.08,0.96,")) << table;
}

TEST(Cli, PredictPrintsOneLinePerName) {
    test::TempDir dir;
    const auto run =
        cli("predict --provider namsor --replay data/fixtures/table3.jsonl Shigeko Mandalay", dir);
    ASSERT_EQ(run.exit_code, 0) << run.err;
    EXPECT_TRUE(contains(run.out, "\"queried_name\":\"shigeko\"")) << run.out;
    EXPECT_TRUE(contains(run.out, "\"p_female\":0.59")) << run.out;
    EXPECT_EQ(std::count(run.out.begin(), run.out.end(), '\n'), 2);

    const auto local = cli("predict --provider local --ssa-dir data/ssa --year 1980 Leslie", dir);
    ASSERT_EQ(local.exit_code, 0) << local.err;
    EXPECT_TRUE(contains(local.out, "\"p_female\":0.52")) << local.out;
}

TEST(Cli, ReplayMissNamesTheStage) {
    test::TempDir dir;
    test::write_file(dir / "empty.jsonl", "");
    const auto run = cli("audit --config data/audit.conf --replay " + quote((dir / "empty.jsonl").string()) +
                             " --out " + quote((dir / "out").string()),
                         dir);
    EXPECT_NE(run.exit_code, 0);
    EXPECT_TRUE(contains(run.err, "predict:genderapi failed")) << run.err;
    EXPECT_TRUE(contains(run.err, "replay")) << run.err;
}

TEST(Cli, QuotaExhaustionNamesTheStage) {
    auto fixtures = std::make_shared<FixtureStore>(test::data_dir() / "fixtures" / "providers.jsonl");
    MockServerOptions options;
    options.quota = 2;
    MockProviderServer server(fixtures, options);
    server.start();
    test::TempDir dir;
    const std::string env = "CG_GENDERIZE_URL=" + quote(server.base_url(Provider::Genderize)) +
                            " CG_GENDERIZE_KEY=test ";
    const auto run = cli("audit --ssa-dir data/ssa --corpus data/dblp.xml --labels data/labels.csv "
                         "--years 1950-1950 --provider genderize --rate-limit 100 --out " +
                             quote((dir / "out").string()),
                         dir, env);
    EXPECT_NE(run.exit_code, 0);
    EXPECT_TRUE(contains(run.err, "predict:genderize failed")) << run.err;
}

TEST(Cli, MissingInputNamesTheStage) {
    test::TempDir dir;
    const auto run = cli("audit --ssa-dir data/ssa --corpus /nonexistent.xml --replay "
                         "data/fixtures/providers.jsonl --out " + quote((dir / "out").string()),
                         dir);
    EXPECT_EQ(run.exit_code, 2);
    EXPECT_TRUE(contains(run.err, "corpus failed")) << run.err;
}
