#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cgaudit/provider_sources.h"

namespace cgaudit {

struct BatchResult {
    /// Responses for the completed prefix of the input, in input order.
    std::vector<ProviderResponse> responses;
    /// Set when the batch stopped early; responses then cover names[0, k).
    std::exception_ptr error;

    bool complete() const noexcept { return !error; }
};

/// One provider behind a uniform interface: cache first, then the payload
/// source (rate limited when remote), then the provider's estimate mapping.
class Predictor {
public:
    Predictor(std::shared_ptr<PayloadSource> source, std::shared_ptr<ResponseCache> cache = nullptr,
              std::shared_ptr<RateLimiter> limiter = nullptr);

    Provider provider() const noexcept { return source_->provider(); }

    /// Throws std::invalid_argument for an empty name, and whatever the
    /// source raises (NetworkError, QuotaExhausted, ReplayMiss, PayloadError).
    ProviderResponse predict(std::string_view first_name);

    /// Order-preserving batch. With concurrency > 1 up to that many requests
    /// are in flight; the rate limit still applies to the provider as a whole.
    BatchResult predict_batch(std::span<const std::string> names, unsigned concurrency = 1);

    /// Number of calls that reached the payload source (cache misses).
    std::uint64_t source_calls() const noexcept;

private:
    std::shared_ptr<PayloadSource> source_;
    std::shared_ptr<ResponseCache> cache_;
    std::shared_ptr<RateLimiter> limiter_;
    std::atomic<std::uint64_t> calls_{0};
};

}  // namespace cgaudit
