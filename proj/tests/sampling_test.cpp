#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cgaudit/sampling.h"

using namespace cgaudit;

namespace {

// Independent oracle: the textbook formula evaluated in long double, with the
// smallest integer n satisfying n >= n0 / (1 + (n0 - 1) / N) found by search.
std::uint64_t oracle_sample_size(std::uint64_t N, long double z, long double e, long double p) {
    const long double n0 = z * z * p * (1 - p) / (e * e);
    const long double corrected = n0 / (1 + (n0 - 1) / static_cast<long double>(N));
    std::uint64_t n = 1;
    while (static_cast<long double>(n) < corrected - 1e-9L) ++n;
    return std::min<std::uint64_t>(n, N);
}

}  // namespace

TEST(SampleSize, KnownPopulations) {
    EXPECT_EQ(sample_size(100000, 1.96, 0.05, 0.5), 383u);
    EXPECT_EQ(sample_size(620, 1.96, 0.05, 0.5), 238u);
    EXPECT_EQ(sample_size(10), 10u);
}

TEST(SampleSize, ConvergesToUncorrectedSize) {
    EXPECT_NEAR(base_sample_size(1.96, 0.05, 0.5), 384.16, 1e-9);
    EXPECT_EQ(sample_size(std::uint64_t{1} << 62), 385u);
}

TEST(SampleSize, Errors) {
    EXPECT_THROW(sample_size(0), std::invalid_argument);
    EXPECT_THROW(sample_size(100, 1.96, 0.0, 0.5), std::invalid_argument);
    EXPECT_THROW(sample_size(100, 1.96, -0.1, 0.5), std::invalid_argument);
    EXPECT_THROW(sample_size(100, 1.96, 0.05, 0.0), std::invalid_argument);
    EXPECT_THROW(sample_size(100, 1.96, 0.05, 1.0), std::invalid_argument);
    EXPECT_THROW(sample_size(100, 0.0, 0.05, 0.5), std::invalid_argument);
}

TEST(SampleSizeProperty, MatchesOracleAndIsMonotone) {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 2000; ++round) {
        const std::uint64_t N = 1 + rng() % 200000;
        EXPECT_EQ(sample_size(N), oracle_sample_size(N, 1.96L, 0.05L, 0.5L)) << "N=" << N;
    }
    std::uint64_t previous = 0;
    for (std::uint64_t N = 1; N <= 5000; ++N) {
        const auto n = sample_size(N);
        EXPECT_GE(n, previous);
        EXPECT_LE(n, N);
        EXPECT_LE(n, 385u);
        previous = n;
    }
    // Other confidence settings.
    for (double z : {1.645, 2.576}) {
        for (double e : {0.01, 0.03, 0.1}) {
            for (std::uint64_t N : {50ull, 620ull, 3000ull, 1000000ull}) {
                EXPECT_EQ(sample_size(N, z, e, 0.5), oracle_sample_size(N, z, e, 0.5L));
            }
        }
    }
}

TEST(DrawSample, DeterministicAndComplete) {
    std::vector<ArticleRecord> articles(50);
    for (int i = 0; i < 50; ++i) articles[i].corpus_key = "k" + std::to_string(i);

    EXPECT_EQ(draw_sample(articles, 50, 9), articles);
    EXPECT_EQ(draw_sample(articles, 12, 42), draw_sample(articles, 12, 42));
    EXPECT_NE(draw_sample(articles, 12, 42), draw_sample(articles, 12, 43));
    EXPECT_TRUE(draw_sample(articles, 0, 1).empty());
    EXPECT_THROW(draw_sample(articles, 51, 1), std::invalid_argument);

    const auto sample = draw_sample(articles, 12, 42);
    EXPECT_EQ(sample.size(), 12u);
    // Corpus order is preserved.
    for (std::size_t i = 1; i < sample.size(); ++i) {
        EXPECT_LT(std::stoi(sample[i - 1].corpus_key.substr(1)),
                  std::stoi(sample[i].corpus_key.substr(1)));
    }
}

TEST(DrawSample, PinnedIndicesForSeed) {
    // Regression pin: the generator and selection rule are part of the
    // reproducibility contract.
    const auto picked = sample_indices(20, 5, 1);
    EXPECT_EQ(picked, sample_indices(20, 5, 1));
    std::mt19937_64 rng(1);
    std::vector<std::size_t> expected;
    for (std::size_t t = 0; t < 20 && expected.size() < 5; ++t) {
        const double u = static_cast<double>(rng() >> 11) / 9007199254740992.0;
        if ((20 - t) * u < 5 - expected.size()) expected.push_back(t);
    }
    EXPECT_EQ(picked, expected);
}

TEST(DrawSampleProperty, InclusionFrequencyIsUniform) {
    // Each of N items should be drawn with probability n/N = 0.1. Over 10000
    // seeds the count per item is Binomial(10000, 0.1): mean 1000, sd 30.
    constexpr std::size_t N = 100, n = 10, trials = 10000;
    std::vector<int> hits(N, 0);
    for (std::uint64_t seed = 0; seed < trials; ++seed) {
        const auto picked = sample_indices(N, n, seed);
        ASSERT_EQ(picked.size(), n);
        for (auto i : picked) ++hits[i];
    }
    const double mean = trials * 0.1;
    const double sd = std::sqrt(trials * 0.1 * 0.9);
    // The first and last positions are where selection sampling would go
    // wrong; they get the 3 sigma band. With 100 items tested at once, the
    // band for all of them is widened to 4 sigma.
    EXPECT_NEAR(hits.front(), mean, 3 * sd);
    EXPECT_NEAR(hits.back(), mean, 3 * sd);
    for (std::size_t i = 0; i < N; ++i) {
        EXPECT_NEAR(hits[i], mean, 4 * sd) << "item " << i;
    }
    // The pooled frequency over all items is much tighter.
    double total = 0;
    for (int h : hits) total += h;
    EXPECT_NEAR(total / (N * trials), 0.1, 1e-12);
}

TEST(RandomPermutation, IsAPermutation) {
    auto order = random_permutation(1000, 77);
    EXPECT_EQ(order, random_permutation(1000, 77));
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(order[i], i);
    EXPECT_TRUE(random_permutation(0, 1).empty());
}

TEST(DeriveSeed, SeparatesYearsAndRuns) {
    EXPECT_NE(derive_seed(1, 1960), derive_seed(1, 1970));
    EXPECT_NE(derive_seed(1, 1960), derive_seed(2, 1960));
    EXPECT_EQ(derive_seed(1, 1960), derive_seed(1, 1960));
}

TEST(SamplePlan, RecordsParameters) {
    const auto plan = make_sample_plan(620, 5);
    EXPECT_EQ(plan.sample_size, 238u);
    EXPECT_EQ(plan.population_size, 620u);
    EXPECT_EQ(plan.seed, 5u);
    EXPECT_EQ(kSampleGenerator, "std::mt19937_64");
}
