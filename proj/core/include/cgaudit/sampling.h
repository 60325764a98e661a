#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cgaudit/bibliography.h"

namespace cgaudit {

inline constexpr std::string_view kSampleGenerator = "std::mt19937_64";

struct SamplePlan {
    std::uint64_t population_size = 0;
    double z = 1.96;
    double margin = 0.05;
    double proportion = 0.5;
    std::uint64_t sample_size = 0;
    std::uint64_t seed = 0;
};

/// Uncorrected sample size z^2 p (1 - p) / e^2.
double base_sample_size(double z, double margin, double proportion);

/// Sample size with finite-population correction, rounded up and capped at N.
/// Throws std::invalid_argument for N < 1, z <= 0, margin outside (0, 1) or
/// proportion outside (0, 1).
std::uint64_t sample_size(std::uint64_t population_size, double z = 1.96, double margin = 0.05,
                          double proportion = 0.5);

SamplePlan make_sample_plan(std::uint64_t population_size, std::uint64_t seed, double z = 1.96,
                            double margin = 0.05, double proportion = 0.5);

/// Indices of a uniform sample of `n` out of `population` items, ascending.
/// Selection sampling over raw mt19937_64 output, so a seed reproduces the
/// same sample on every platform. Throws std::invalid_argument when n > population.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n, std::uint64_t seed);

/// Uniformly random permutation of 0..n-1 (Fisher-Yates over raw mt19937_64
/// output, so it is the same on every platform).
std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed);

/// Uniform sample without replacement preserving corpus order.
std::vector<ArticleRecord> draw_sample(std::span<const ArticleRecord> articles, std::size_t n,
                                       std::uint64_t seed);

/// Per-stream seed derived from a run seed and a year (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t run_seed, int year) noexcept;

}  // namespace cgaudit
