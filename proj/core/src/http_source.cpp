#include "cgaudit/http_source.h"

#include <cctype>
#include <cstdlib>
#include <httplib.h>
#include <regex>
#include <thread>

namespace cgaudit {

std::string default_base_url(Provider provider) {
    switch (provider) {
    case Provider::GenderApi: return "https://gender-api.com";
    case Provider::NamSor: return "https://v2.namsor.com/NamSorAPIv2";
    case Provider::Genderize: return "https://api.genderize.io";
    case Provider::LocalHistorical: return "";
    }
    return "";
}

HttpEndpoint endpoint_from_environment(Provider provider) {
    HttpEndpoint endpoint;
    endpoint.base_url = default_base_url(provider);
    const std::string var(credential_env_var(provider));
    if (!var.empty()) {
        if (const char *key = std::getenv(var.c_str())) endpoint.api_key = key;
    }
    // CG_<PROVIDER>_URL points a provider at another host, e.g. the mock server.
    std::string url_var = "CG_" + std::string(provider_id(provider)) + "_URL";
    for (auto &c : url_var) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char *url = std::getenv(url_var.c_str()); url && *url) endpoint.base_url = url;
    return endpoint;
}

std::string url_encode(std::string_view text) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 15]);
        }
    }
    return out;
}

std::string request_target(Provider provider, std::string_view name, std::string_view api_key) {
    switch (provider) {
    case Provider::GenderApi: {
        std::string target = "/get?name=" + url_encode(name);
        if (!api_key.empty()) target += "&key=" + url_encode(api_key);
        return target;
    }
    case Provider::NamSor: return "/api2/json/gender/" + url_encode(name);
    case Provider::Genderize: {
        std::string target = "/?name=" + url_encode(name);
        if (!api_key.empty()) target += "&apikey=" + url_encode(api_key);
        return target;
    }
    case Provider::LocalHistorical: break;
    }
    throw std::invalid_argument("local provider has no HTTP endpoint");
}

HttpPayloadSource::HttpPayloadSource(Provider provider, HttpEndpoint endpoint)
    : provider_(provider), endpoint_(std::move(endpoint)) {
    if (provider == Provider::LocalHistorical) {
        throw std::invalid_argument("local provider has no HTTP endpoint");
    }
    static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch match;
    if (!std::regex_match(endpoint_.base_url, match, kUrl)) {
        throw std::invalid_argument("bad base URL: " + endpoint_.base_url);
    }
    scheme_host_port_ = match[1].str();
    path_prefix_ = match[2].str();
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

FetchedPayload HttpPayloadSource::fetch(std::string_view name) {
    httplib::Client client(scheme_host_port_);
    if (!client.is_valid()) {
        throw NetworkError("cannot create HTTP client for " + scheme_host_port_ +
                           " (https needs a build with OpenSSL)");
    }
    const auto timeout = endpoint_.timeout;
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);

    httplib::Headers headers{{"Accept", "application/json"}};
    if (provider_ == Provider::NamSor && !endpoint_.api_key.empty()) {
        headers.emplace("X-API-KEY", endpoint_.api_key);
    }
    const std::string target = path_prefix_ + request_target(provider_, name, endpoint_.api_key);
    const std::string label = std::string(provider_id(provider_)) + " " + scheme_host_port_;

    std::string last_error;
    for (int attempt = 0; attempt <= endpoint_.max_retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(endpoint_.backoff * (1 << (attempt - 1)));
        auto result = client.Get(target, headers);
        if (!result) {
            last_error = "transport error: " + httplib::to_string(result.error());
            continue;
        }
        const int status = result->status;
        if (status == 200) return FetchedPayload{result->body, utc_timestamp_now()};
        if (status == 402 || status == 429) {
            throw QuotaExhausted(label + ": quota exhausted (HTTP " + std::to_string(status) + ")");
        }
        last_error = "HTTP " + std::to_string(status);
        if (status < 500) break;
    }
    throw NetworkError(label + ": " + last_error + " for '" + std::string(name) + "'");
}

}  // namespace cgaudit
