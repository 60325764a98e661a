#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cgaudit/provider_sources.h"

namespace cgaudit {

struct MockServerOptions {
    std::string host = "127.0.0.1";
    /// 0 picks a free port.
    int port = 0;
    /// Requests per provider before answering 429.
    std::optional<std::uint64_t> quota;
    /// Requests per provider answered 503 before normal service.
    std::uint64_t fail_first = 0;
};

/// Local HTTP server speaking the three remote payload shapes from a fixture
/// store. Each provider lives under its own prefix (/genderapi, /namsor,
/// /genderize) so one server stands in for all three. Names absent from the
/// fixture get the provider's "no answer" payload.
class MockProviderServer {
public:
    MockProviderServer(std::shared_ptr<const FixtureStore> fixtures, MockServerOptions options = {});
    ~MockProviderServer();
    MockProviderServer(const MockProviderServer &) = delete;
    MockProviderServer &operator=(const MockProviderServer &) = delete;

    /// Binds and serves on a background thread; returns the bound port.
    int start();
    /// Serves on the calling thread until stop() is called from elsewhere.
    void listen_blocking();
    void stop();

    int port() const noexcept { return port_; }
    /// Base URL for a provider, e.g. http://127.0.0.1:8080/namsor.
    std::string base_url(Provider provider) const;

    std::uint64_t request_count(Provider provider) const;
    std::vector<std::chrono::steady_clock::time_point> request_times(Provider provider) const;

    /// The "no answer" payload the server sends for unknown names.
    static std::string unknown_payload(Provider provider, std::string_view name);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

}  // namespace cgaudit
