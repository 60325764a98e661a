#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cgaudit/estimate.h"

namespace cgaudit {

/// Payload shapes understood by the adapters. See docs/adapters.md.
enum class Provider { GenderApi, NamSor, Genderize, LocalHistorical };

/// "genderapi", "namsor", "genderize", "local".
std::string_view provider_id(Provider provider) noexcept;
std::optional<Provider> parse_provider(std::string_view id) noexcept;
/// The three remote services, in report column order.
const std::vector<Provider> &remote_providers();

/// Environment variable holding the provider's API key, empty for local.
std::string_view credential_env_var(Provider provider) noexcept;

struct ProviderResponse {
    Provider provider = Provider::LocalHistorical;
    std::string queried_name;
    std::string raw_payload;
    GenderEstimate estimate;
    std::string fetched_at;

    bool operator==(const ProviderResponse &) const = default;
};

/// Transport failure that survived the retry budget.
class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The provider refused further requests; a batch stops at this point.
class QuotaExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Payload that does not match the provider's shape. Keeps the payload.
class PayloadError : public std::runtime_error {
public:
    PayloadError(const std::string &what, std::string payload)
        : std::runtime_error(what), payload_(std::move(payload)) {}
    const std::string &payload() const noexcept { return payload_; }

private:
    std::string payload_;
};

/// Replay store has no entry for (provider, name).
class ReplayMiss : public std::runtime_error {
public:
    ReplayMiss(Provider provider, std::string name);
    Provider provider() const noexcept { return provider_; }
    const std::string &name() const noexcept { return name_; }

private:
    Provider provider_;
    std::string name_;
};

/// Maps a raw payload to a normalized estimate. For a male-labelled answer
/// with confidence c the female probability is 1 - c. Answers without a
/// gender map to Unknown. Throws PayloadError for unparsable payloads.
GenderEstimate parse_payload(Provider provider, std::string_view payload);

/// Canonical single-line JSON of a response; equal responses serialize to
/// identical bytes.
std::string to_json_line(const ProviderResponse &response);
ProviderResponse response_from_json_line(std::string_view line);

enum class Majority { Male, Female };

struct BackCalculatedCounts {
    std::uint64_t male_count = 0;
    std::uint64_t female_count = 0;
    /// The recovered majority share, rounded to two places, matches the
    /// reported accuracy at its two-decimal precision.
    bool consistent = false;
    /// Reported 100% certainty from fewer than ten samples.
    bool small_sample_certainty = false;
};

inline constexpr std::uint64_t kSmallSampleFloor = 10;

/// Recovers the integer counts behind an "accuracy" that is really the
/// majority share. Throws std::invalid_argument for samples == 0 or accuracy
/// outside [0.5, 1].
BackCalculatedCounts back_calculate_counts(double accuracy, std::uint64_t samples, Majority majority);

}  // namespace cgaudit
