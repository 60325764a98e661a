#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cgaudit {

enum class EstimateMethod { HistoricalModel, Provider, GroundTruth, Unknown };

std::string_view to_string(EstimateMethod method) noexcept;

/// A p(F) value with its provenance. p_male is always 1 - p_female and is
/// never stored. An Unknown estimate carries no probability at all.
class GenderEstimate {
public:
    GenderEstimate() = default;

    static GenderEstimate unknown(std::optional<int> query_year = std::nullopt);
    static GenderEstimate historical(double p_female, std::uint64_t sample_size, int query_year,
                                     int window_radius);
    static GenderEstimate from_provider(std::string provider, double p_female,
                                        std::uint64_t sample_size);
    static GenderEstimate ground_truth(double p_female);
    /// A provider that answered without a gender.
    static GenderEstimate provider_unknown(std::string provider);

    bool known() const noexcept { return p_female_.has_value(); }
    /// Throws std::logic_error for an Unknown estimate.
    double p_female() const;
    double p_male() const { return 1.0 - p_female(); }
    std::optional<double> maybe_p_female() const noexcept { return p_female_; }

    EstimateMethod method() const noexcept { return method_; }
    std::uint64_t sample_size() const noexcept { return sample_size_; }
    const std::string &provider() const noexcept { return provider_; }
    std::optional<int> query_year() const noexcept { return query_year_; }
    /// Year radius actually used by a windowed historical lookup.
    std::optional<int> window_radius() const noexcept { return window_radius_; }

    bool operator==(const GenderEstimate &) const = default;

private:
    std::optional<double> p_female_;
    std::uint64_t sample_size_ = 0;
    EstimateMethod method_ = EstimateMethod::Unknown;
    std::string provider_;
    std::optional<int> query_year_;
    std::optional<int> window_radius_;
};

}  // namespace cgaudit
