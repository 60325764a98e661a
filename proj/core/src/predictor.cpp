#include "cgaudit/predictor.h"

#include <mutex>
#include <stdexcept>
#include <thread>

#include "cgaudit/text.h"

namespace cgaudit {

Predictor::Predictor(std::shared_ptr<PayloadSource> source, std::shared_ptr<ResponseCache> cache,
                     std::shared_ptr<RateLimiter> limiter)
    : source_(std::move(source)), cache_(std::move(cache)), limiter_(std::move(limiter)) {
    if (!source_) throw std::invalid_argument("predictor needs a payload source");
}

ProviderResponse Predictor::predict(std::string_view first_name) {
    const std::string key = fold_name(first_name);
    if (key.empty()) throw std::invalid_argument("empty first name");
    const Provider provider = source_->provider();

    if (cache_) {
        if (auto hit = cache_->find(provider, key)) {
            GenderEstimate estimate = parse_payload(provider, hit->payload);
            return ProviderResponse{provider, key, std::move(hit->payload), std::move(estimate),
                                    std::move(hit->fetched_at)};
        }
    }
    if (limiter_ && source_->remote()) limiter_->acquire();
    calls_.fetch_add(1, std::memory_order_relaxed);
    FetchedPayload fetched = source_->fetch(trim(first_name));
    GenderEstimate estimate = parse_payload(provider, fetched.payload);
    if (cache_) cache_->append(FixtureRecord{provider, key, fetched.payload, fetched.fetched_at});
    return ProviderResponse{provider, key, std::move(fetched.payload), std::move(estimate),
                            std::move(fetched.fetched_at)};
}

BatchResult Predictor::predict_batch(std::span<const std::string> names, unsigned concurrency) {
    BatchResult result;
    if (concurrency <= 1 || names.size() <= 1) {
        result.responses.reserve(names.size());
        for (const auto &name : names) {
            try {
                result.responses.push_back(predict(name));
            } catch (...) {
                result.error = std::current_exception();
                break;
            }
        }
        return result;
    }

    // Workers claim indices in increasing order and stop claiming after the
    // first failure, so every index below the failing one has completed.
    std::vector<std::optional<ProviderResponse>> slots(names.size());
    std::vector<std::exception_ptr> errors(names.size());
    std::mutex mutex;
    std::size_t next = 0;
    bool failed = false;

    auto worker = [&] {
        for (;;) {
            std::size_t index;
            {
                std::lock_guard lock(mutex);
                if (failed || next >= names.size()) return;
                index = next++;
            }
            try {
                slots[index] = predict(names[index]);
            } catch (...) {
                std::lock_guard lock(mutex);
                errors[index] = std::current_exception();
                failed = true;
            }
        }
    };
    const unsigned workers = std::min<std::size_t>(concurrency, names.size());
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) threads.emplace_back(worker);
    for (auto &thread : threads) thread.join();

    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!slots[i]) {
            result.error = errors[i];
            if (!result.error) result.error = std::make_exception_ptr(
                std::runtime_error("batch stopped before '" + names[i] + "'"));
            break;
        }
        result.responses.push_back(std::move(*slots[i]));
    }
    return result;
}

std::uint64_t Predictor::source_calls() const noexcept {
    return calls_.load(std::memory_order_relaxed);
}

}  // namespace cgaudit
