#pragma once

#include <chrono>
#include <string>
#include <string_view>

#include "cgaudit/provider_sources.h"

namespace cgaudit {

struct HttpEndpoint {
    /// scheme://host[:port][/path-prefix]
    std::string base_url;
    std::string api_key;
    std::chrono::milliseconds timeout{10000};
    int max_retries = 3;
    std::chrono::milliseconds backoff{200};
};

/// Public service URL for each remote provider.
std::string default_base_url(Provider provider);

/// Endpoint with the default URL and the key from the provider's environment
/// variable (empty when unset). CG_GENDERAPI_URL, CG_NAMSOR_URL and
/// CG_GENDERIZE_URL override the URL.
HttpEndpoint endpoint_from_environment(Provider provider);

/// Request target (path and query) for a name, relative to the base URL:
///   genderapi  GET /get?name=<n>&key=<k>
///   namsor     GET /api2/json/gender/<n>        (X-API-KEY header)
///   genderize  GET /?name=<n>&apikey=<k>
std::string request_target(Provider provider, std::string_view name, std::string_view api_key);

std::string url_encode(std::string_view text);

/// Live HTTP source. Transport errors and 5xx answers are retried with
/// exponential backoff up to max_retries, then raise NetworkError. 402 and
/// 429 raise QuotaExhausted at once. Other non-200 answers raise NetworkError.
class HttpPayloadSource : public PayloadSource {
public:
    HttpPayloadSource(Provider provider, HttpEndpoint endpoint);
    Provider provider() const noexcept override { return provider_; }
    bool remote() const noexcept override { return true; }
    FetchedPayload fetch(std::string_view name) override;

private:
    Provider provider_;
    HttpEndpoint endpoint_;
    std::string scheme_host_port_;
    std::string path_prefix_;
};

}  // namespace cgaudit
