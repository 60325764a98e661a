#include "cgaudit/mock_server.h"

#include <httplib.h>
#include <mutex>
#include <json.hpp>
#include <stdexcept>

#include "cgaudit/text.h"

namespace cgaudit {

namespace {

constexpr std::string_view prefix_for(Provider provider) {
    switch (provider) {
    case Provider::GenderApi: return "/genderapi";
    case Provider::NamSor: return "/namsor";
    case Provider::Genderize: return "/genderize";
    case Provider::LocalHistorical: break;
    }
    return "";
}

struct ProviderLog {
    std::uint64_t count = 0;
    std::vector<std::chrono::steady_clock::time_point> times;
};

}  // namespace

struct MockProviderServer::Impl {
    std::shared_ptr<const FixtureStore> fixtures;
    MockServerOptions options;
    httplib::Server server;
    std::thread thread;
    mutable std::mutex mutex;
    std::map<Provider, ProviderLog> logs;

    void answer(Provider provider, const std::string &name, httplib::Response &res) {
        std::uint64_t seen;
        {
            std::lock_guard lock(mutex);
            auto &log = logs[provider];
            log.times.push_back(std::chrono::steady_clock::now());
            seen = ++log.count;
        }
        if (seen <= options.fail_first) {
            res.status = 503;
            res.set_content(R"({"error":"unavailable"})", "application/json");
            return;
        }
        if (options.quota && seen > options.fail_first + *options.quota) {
            res.status = 429;
            res.set_content(R"({"error":"quota exceeded"})", "application/json");
            return;
        }
        if (name.empty()) {
            res.status = 400;
            res.set_content(R"({"error":"missing name"})", "application/json");
            return;
        }
        auto record = fixtures->find(provider, name);
        res.set_content(record ? record->payload : unknown_payload(provider, name),
                        "application/json");
    }
};

MockProviderServer::MockProviderServer(std::shared_ptr<const FixtureStore> fixtures,
                                       MockServerOptions options)
    : impl_(std::make_unique<Impl>()) {
    if (!fixtures) throw std::invalid_argument("mock server needs a fixture store");
    impl_->fixtures = std::move(fixtures);
    impl_->options = std::move(options);

    Impl *impl = impl_.get();
    impl->server.Get("/genderapi/get", [impl](const httplib::Request &req, httplib::Response &res) {
        impl->answer(Provider::GenderApi, req.get_param_value("name"), res);
    });
    impl->server.Get(R"(/namsor/api2/json/gender/([^/]+))",
                     [impl](const httplib::Request &req, httplib::Response &res) {
                         impl->answer(Provider::NamSor, req.matches[1].str(), res);
                     });
    impl->server.Get(R"(/genderize/?)", [impl](const httplib::Request &req, httplib::Response &res) {
        impl->answer(Provider::Genderize, req.get_param_value("name"), res);
    });
}

MockProviderServer::~MockProviderServer() { stop(); }

int MockProviderServer::start() {
    auto &server = impl_->server;
    const auto &opts = impl_->options;
    if (opts.port == 0) {
        port_ = server.bind_to_any_port(opts.host);
    } else {
        port_ = server.bind_to_port(opts.host, opts.port) ? opts.port : -1;
    }
    if (port_ <= 0) throw std::runtime_error("mock server cannot bind " + opts.host);
    impl_->thread = std::thread([&server] { server.listen_after_bind(); });
    server.wait_until_ready();
    return port_;
}

void MockProviderServer::listen_blocking() {
    auto &server = impl_->server;
    const auto &opts = impl_->options;
    if (opts.port == 0) {
        port_ = server.bind_to_any_port(opts.host);
    } else {
        port_ = server.bind_to_port(opts.host, opts.port) ? opts.port : -1;
    }
    if (port_ <= 0) throw std::runtime_error("mock server cannot bind " + opts.host);
    server.listen_after_bind();
}

void MockProviderServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockProviderServer::base_url(Provider provider) const {
    return "http://" + impl_->options.host + ":" + std::to_string(port_) +
           std::string(prefix_for(provider));
}

std::uint64_t MockProviderServer::request_count(Provider provider) const {
    std::lock_guard lock(impl_->mutex);
    auto it = impl_->logs.find(provider);
    return it == impl_->logs.end() ? 0 : it->second.count;
}

std::vector<std::chrono::steady_clock::time_point> MockProviderServer::request_times(
    Provider provider) const {
    std::lock_guard lock(impl_->mutex);
    auto it = impl_->logs.find(provider);
    return it == impl_->logs.end() ? std::vector<std::chrono::steady_clock::time_point>{}
                                   : it->second.times;
}

std::string MockProviderServer::unknown_payload(Provider provider, std::string_view name) {
    using nlohmann::json;
    const std::string folded = fold_name(name);
    switch (provider) {
    case Provider::GenderApi:
        return json{{"name", folded}, {"gender", "unknown"}, {"samples", 0}, {"accuracy", 0}}
            .dump();
    case Provider::NamSor:
        return json{{"firstName", folded}, {"likelyGender", "unknown"},
                    {"probabilityCalibrated", -1}}
            .dump();
    case Provider::Genderize:
        return json{{"name", folded}, {"gender", nullptr}, {"probability", 0.0}, {"count", 0}}
            .dump();
    case Provider::LocalHistorical: break;
    }
    throw std::invalid_argument("local provider has no mock endpoint");
}

}  // namespace cgaudit
