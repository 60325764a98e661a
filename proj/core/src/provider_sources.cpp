#include "cgaudit/provider_sources.h"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "cgaudit/text.h"

namespace cgaudit {

using nlohmann::json;

std::string utc_timestamp_now() {
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer;
}

std::string to_json_line(const FixtureRecord &record) {
    json doc = {
        {"provider", std::string(provider_id(record.provider))},
        {"name", record.name},
        {"payload", record.payload},
        {"fetched_at", record.fetched_at},
    };
    return doc.dump();
}

FixtureRecord fixture_record_from_json_line(std::string_view line) {
    json doc = json::parse(line.begin(), line.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw std::runtime_error("fixture line is not a JSON object");
    }
    FixtureRecord record;
    const auto provider = parse_provider(doc.value("provider", ""));
    if (!provider) throw std::runtime_error("fixture line has an unknown provider");
    record.provider = *provider;
    record.name = doc.value("name", "");
    if (record.name.empty()) throw std::runtime_error("fixture line has no name");
    auto payload = doc.find("payload");
    if (payload == doc.end()) throw std::runtime_error("fixture line has no payload");
    // Payloads are stored verbatim as strings; an inline object is accepted too.
    record.payload = payload->is_string() ? payload->get<std::string>() : payload->dump();
    record.fetched_at = doc.value("fetched_at", "");
    return record;
}

// ---------------------------------------------------------------------------
// FixtureStore

FixtureStore::FixtureStore(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(*path_, std::ios::binary);
    if (!in) return;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        FixtureRecord record;
        try {
            record = fixture_record_from_json_line(line);
        } catch (const std::exception &e) {
            throw std::runtime_error(path_->string() + ":" + std::to_string(line_no) + ": " +
                                     e.what());
        }
        Key key{record.provider, fold_name(record.name)};
        if (by_key_.try_emplace(key, std::move(record)).second) order_.push_back(std::move(key));
    }
}

std::shared_ptr<FixtureStore> FixtureStore::in_memory(std::vector<FixtureRecord> records) {
    auto store = std::make_shared<FixtureStore>();
    for (auto &record : records) store->append(std::move(record));
    return store;
}

std::optional<FixtureRecord> FixtureStore::find(Provider provider, std::string_view name) const {
    std::shared_lock lock(mutex_);
    auto it = by_key_.find(Key{provider, fold_name(name)});
    if (it == by_key_.end()) return std::nullopt;
    return it->second;
}

bool FixtureStore::append(FixtureRecord record) {
    std::unique_lock lock(mutex_);
    Key key{record.provider, fold_name(record.name)};
    if (by_key_.contains(key)) return false;
    if (path_) {
        std::ofstream out(*path_, std::ios::binary | std::ios::app);
        if (!out) throw std::runtime_error("cannot append to " + path_->string());
        out << to_json_line(record) << '\n';
        out.flush();
        if (!out) throw std::runtime_error("write failed on " + path_->string());
    }
    by_key_.emplace(key, std::move(record));
    order_.push_back(std::move(key));
    return true;
}

std::size_t FixtureStore::size() const {
    std::shared_lock lock(mutex_);
    return by_key_.size();
}

std::vector<FixtureRecord> FixtureStore::records() const {
    std::shared_lock lock(mutex_);
    std::vector<FixtureRecord> out;
    out.reserve(order_.size());
    for (const auto &key : order_) out.push_back(by_key_.at(key));
    return out;
}

// ---------------------------------------------------------------------------
// Sources

ReplaySource::ReplaySource(Provider provider, std::shared_ptr<const FixtureStore> store)
    : provider_(provider), store_(std::move(store)) {
    if (!store_) throw std::invalid_argument("replay source needs a fixture store");
}

FetchedPayload ReplaySource::fetch(std::string_view name) {
    auto record = store_->find(provider_, name);
    if (!record) throw ReplayMiss(provider_, fold_name(name));
    return FetchedPayload{std::move(record->payload), std::move(record->fetched_at)};
}

RecordingSource::RecordingSource(std::shared_ptr<PayloadSource> inner,
                                 std::shared_ptr<FixtureStore> store)
    : inner_(std::move(inner)), store_(std::move(store)) {
    if (!inner_ || !store_) throw std::invalid_argument("recording source needs a source and store");
}

FetchedPayload RecordingSource::fetch(std::string_view name) {
    FetchedPayload fetched = inner_->fetch(name);
    store_->append(FixtureRecord{inner_->provider(), fold_name(name), fetched.payload,
                                 fetched.fetched_at});
    return fetched;
}

LocalHistoricalSource::LocalHistoricalSource(std::shared_ptr<const NameGenderTable> table,
                                             int birth_year, int window)
    : table_(std::move(table)), birth_year_(birth_year), window_(window) {
    if (!table_) throw std::invalid_argument("local source needs a name table");
}

FetchedPayload LocalHistoricalSource::fetch(std::string_view name) {
    const GenderEstimate estimate = lookup_p_female(*table_, name, birth_year_, window_);
    json doc = {{"name", fold_name(name)}, {"year", birth_year_}};
    if (estimate.known()) {
        const auto total = estimate.sample_size();
        const auto female = static_cast<std::uint64_t>(
            std::llround(estimate.p_female() * static_cast<double>(total)));
        doc["female"] = female;
        doc["male"] = total - female;
        doc["radius"] = estimate.window_radius().value_or(0);
    } else {
        doc["female"] = 0;
        doc["male"] = 0;
    }
    return FetchedPayload{doc.dump(), ""};
}

// ---------------------------------------------------------------------------
// RateLimiter

namespace {
// Added to the window so that a server-side log of arrival times, which sees
// transport jitter, also stays under the ceiling.
constexpr std::chrono::milliseconds kJitterGuard{25};
}  // namespace

RateLimiter::RateLimiter(double max_per_second) : max_per_second_(max_per_second) {
    if (!(max_per_second > 0.0)) throw std::invalid_argument("rate limit must be positive");
    if (max_per_second >= 1.0) {
        burst_ = static_cast<std::size_t>(std::floor(max_per_second));
        window_ = std::chrono::seconds(1);
    } else {
        burst_ = 1;
        window_ = std::chrono::nanoseconds(static_cast<std::int64_t>(1e9 / max_per_second));
    }
    window_ += kJitterGuard;
}

void RateLimiter::acquire() {
    std::lock_guard lock(mutex_);
    auto now = Clock::now();
    for (;;) {
        while (!recent_.empty() && now - recent_.front() >= window_) recent_.pop_front();
        if (recent_.size() < burst_) break;
        std::this_thread::sleep_until(recent_.front() + window_);
        now = Clock::now();
    }
    recent_.push_back(now);
    history_.push_back(now);
}

std::vector<RateLimiter::Clock::time_point> RateLimiter::history() const {
    std::lock_guard lock(mutex_);
    return history_;
}

std::size_t max_in_window(std::vector<RateLimiter::Clock::time_point> times,
                          std::chrono::nanoseconds window) {
    std::sort(times.begin(), times.end());
    std::size_t best = 0;
    std::size_t lo = 0;
    for (std::size_t hi = 0; hi < times.size(); ++hi) {
        while (times[hi] - times[lo] >= window) ++lo;
        best = std::max(best, hi - lo + 1);
    }
    return best;
}

}  // namespace cgaudit
