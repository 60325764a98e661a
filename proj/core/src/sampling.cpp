#include "cgaudit/sampling.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace cgaudit {
namespace {

// Tolerance for rounding up values that are integers up to floating error.
constexpr double kCeilSlack = 1e-9;

void check_parameters(double z, double margin, double proportion) {
    if (!(z > 0.0)) throw std::invalid_argument("confidence z must be positive");
    if (!(margin > 0.0 && margin < 1.0)) throw std::invalid_argument("margin must lie in (0, 1)");
    if (!(proportion > 0.0 && proportion < 1.0)) {
        throw std::invalid_argument("proportion must lie in (0, 1)");
    }
}

}  // namespace

double base_sample_size(double z, double margin, double proportion) {
    check_parameters(z, margin, proportion);
    return z * z * proportion * (1.0 - proportion) / (margin * margin);
}

std::uint64_t sample_size(std::uint64_t population_size, double z, double margin,
                          double proportion) {
    if (population_size < 1) throw std::invalid_argument("population size must be at least 1");
    const double n0 = base_sample_size(z, margin, proportion);
    const double corrected = n0 / (1.0 + (n0 - 1.0) / static_cast<double>(population_size));
    const double rounded = std::max(1.0, std::ceil(corrected - kCeilSlack));
    const auto n = static_cast<std::uint64_t>(rounded);
    return std::min(n, population_size);
}

SamplePlan make_sample_plan(std::uint64_t population_size, std::uint64_t seed, double z,
                            double margin, double proportion) {
    SamplePlan plan;
    plan.population_size = population_size;
    plan.z = z;
    plan.margin = margin;
    plan.proportion = proportion;
    plan.seed = seed;
    plan.sample_size = sample_size(population_size, z, margin, proportion);
    return plan;
}

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n, std::uint64_t seed) {
    if (n > population) {
        throw std::invalid_argument("sample of " + std::to_string(n) + " from " +
                                    std::to_string(population) + " items");
    }
    std::vector<std::size_t> picked;
    picked.reserve(n);
    std::mt19937_64 rng(seed);
    // Selection sampling: item t is taken with probability (n - m) / (N - t).
    for (std::size_t t = 0; t < population && picked.size() < n; ++t) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const std::size_t remaining = population - t;
        const std::size_t needed = n - picked.size();
        if (static_cast<double>(remaining) * u < static_cast<double>(needed)) picked.push_back(t);
    }
    return picked;
}

std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const auto j = std::min(i - 1, static_cast<std::size_t>(u * static_cast<double>(i)));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

std::vector<ArticleRecord> draw_sample(std::span<const ArticleRecord> articles, std::size_t n,
                                       std::uint64_t seed) {
    std::vector<ArticleRecord> sample;
    sample.reserve(n);
    for (std::size_t index : sample_indices(articles.size(), n, seed)) {
        sample.push_back(articles[index]);
    }
    return sample;
}

std::uint64_t derive_seed(std::uint64_t run_seed, int year) noexcept {
    std::uint64_t z = run_seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(year + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace cgaudit
