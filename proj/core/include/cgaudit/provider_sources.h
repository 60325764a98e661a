#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cgaudit/name_model.h"
#include "cgaudit/predictors.h"

namespace cgaudit {

/// A raw answer for one name and the time it was obtained.
struct FetchedPayload {
    std::string payload;
    std::string fetched_at;
};

/// Where payloads come from: a live service, a replay fixture, the local model.
class PayloadSource {
public:
    virtual ~PayloadSource() = default;
    virtual Provider provider() const noexcept = 0;
    /// Live network sources are rate limited, replay and local are not.
    virtual bool remote() const noexcept = 0;
    virtual FetchedPayload fetch(std::string_view name) = 0;
};

/// UTC time as ISO 8601 with seconds, e.g. 2021-05-09T12:00:00Z.
std::string utc_timestamp_now();

/// One line of the newline-delimited JSON fixture and cache format:
/// {"provider": ..., "name": ..., "payload": ..., "fetched_at": ...}.
struct FixtureRecord {
    Provider provider = Provider::GenderApi;
    std::string name;
    std::string payload;
    std::string fetched_at;
};

std::string to_json_line(const FixtureRecord &record);
FixtureRecord fixture_record_from_json_line(std::string_view line);

/// Append-only NDJSON store keyed by (provider, folded name). Readers share a
/// lock; appends are serialized and flushed line by line. The first record
/// for a key wins on load.
class FixtureStore {
public:
    FixtureStore() = default;
    /// Loads `path` when it exists; later appends go to the same file.
    explicit FixtureStore(std::filesystem::path path);

    static std::shared_ptr<FixtureStore> in_memory(std::vector<FixtureRecord> records);

    std::optional<FixtureRecord> find(Provider provider, std::string_view name) const;
    /// Returns false (and writes nothing) when the key is already present.
    bool append(FixtureRecord record);
    std::size_t size() const;
    std::vector<FixtureRecord> records() const;
    const std::optional<std::filesystem::path> &path() const noexcept { return path_; }

private:
    using Key = std::pair<Provider, std::string>;
    mutable std::shared_mutex mutex_;
    std::map<Key, FixtureRecord> by_key_;
    std::vector<Key> order_;
    std::optional<std::filesystem::path> path_;
};

/// Serves recorded payloads without network access.
class ReplaySource : public PayloadSource {
public:
    ReplaySource(Provider provider, std::shared_ptr<const FixtureStore> store);
    Provider provider() const noexcept override { return provider_; }
    bool remote() const noexcept override { return false; }
    /// Throws ReplayMiss naming the missing key.
    FetchedPayload fetch(std::string_view name) override;

private:
    Provider provider_;
    std::shared_ptr<const FixtureStore> store_;
};

/// Forwards to a live source and appends every payload verbatim to a store.
class RecordingSource : public PayloadSource {
public:
    RecordingSource(std::shared_ptr<PayloadSource> inner, std::shared_ptr<FixtureStore> store);
    Provider provider() const noexcept override { return inner_->provider(); }
    bool remote() const noexcept override { return inner_->remote(); }
    FetchedPayload fetch(std::string_view name) override;

private:
    std::shared_ptr<PayloadSource> inner_;
    std::shared_ptr<FixtureStore> store_;
};

/// Year-specific answers from the historical name model, rendered as
/// {"name":..., "year":..., "female":..., "male":..., "radius":...}.
class LocalHistoricalSource : public PayloadSource {
public:
    LocalHistoricalSource(std::shared_ptr<const NameGenderTable> table, int birth_year,
                          int window = kDefaultLookupWindow);
    Provider provider() const noexcept override { return Provider::LocalHistorical; }
    bool remote() const noexcept override { return false; }
    FetchedPayload fetch(std::string_view name) override;

private:
    std::shared_ptr<const NameGenderTable> table_;
    int birth_year_;
    int window_;
};

/// Persistent response cache; same file format as the fixture store.
using ResponseCache = FixtureStore;

/// Sliding-window limiter: at most `max_per_second` acquisitions in any
/// one-second window. Shared by all workers of a provider.
class RateLimiter {
public:
    using Clock = std::chrono::steady_clock;

    explicit RateLimiter(double max_per_second);

    /// Blocks until a slot is free and records the acquisition time.
    void acquire();

    double max_per_second() const noexcept { return max_per_second_; }
    std::vector<Clock::time_point> history() const;

private:
    double max_per_second_;
    std::size_t burst_;
    std::chrono::nanoseconds window_;
    mutable std::mutex mutex_;
    std::deque<Clock::time_point> recent_;
    std::vector<Clock::time_point> history_;
};

/// Maximum number of acquisitions inside any window of `window` length.
std::size_t max_in_window(std::vector<RateLimiter::Clock::time_point> times,
                          std::chrono::nanoseconds window);

}  // namespace cgaudit
