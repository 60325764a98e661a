#include "cgaudit/predictors.h"

#include <cmath>
#include <json.hpp>

namespace cgaudit {

using nlohmann::json;

std::string_view provider_id(Provider provider) noexcept {
    switch (provider) {
    case Provider::GenderApi: return "genderapi";
    case Provider::NamSor: return "namsor";
    case Provider::Genderize: return "genderize";
    case Provider::LocalHistorical: return "local";
    }
    return "local";
}

std::optional<Provider> parse_provider(std::string_view id) noexcept {
    if (id == "genderapi") return Provider::GenderApi;
    if (id == "namsor") return Provider::NamSor;
    if (id == "genderize") return Provider::Genderize;
    if (id == "local") return Provider::LocalHistorical;
    return std::nullopt;
}

const std::vector<Provider> &remote_providers() {
    static const std::vector<Provider> providers{Provider::GenderApi, Provider::NamSor,
                                                 Provider::Genderize};
    return providers;
}

std::string_view credential_env_var(Provider provider) noexcept {
    switch (provider) {
    case Provider::GenderApi: return "CG_GENDERAPI_KEY";
    case Provider::NamSor: return "CG_NAMSOR_KEY";
    case Provider::Genderize: return "CG_GENDERIZE_KEY";
    case Provider::LocalHistorical: return "";
    }
    return "";
}

ReplayMiss::ReplayMiss(Provider provider, std::string name)
    : std::runtime_error("replay fixture has no entry for (" + std::string(provider_id(provider)) +
                         ", " + name + ")"),
      provider_(provider), name_(std::move(name)) {}

namespace {

[[noreturn]] void bad_payload(Provider provider, std::string_view payload, const std::string &why) {
    throw PayloadError(std::string(provider_id(provider)) + " payload: " + why,
                       std::string(payload));
}

double number_field(Provider provider, std::string_view payload, const json &doc,
                    const char *field) {
    auto it = doc.find(field);
    if (it == doc.end() || !it->is_number()) {
        bad_payload(provider, payload, std::string("missing numeric field '") + field + "'");
    }
    return it->get<double>();
}

std::uint64_t count_field(const json &doc, const char *field) {
    auto it = doc.find(field);
    if (it == doc.end() || !it->is_number()) return 0;
    const double v = it->get<double>();
    return v > 0 ? static_cast<std::uint64_t>(std::llround(v)) : 0;
}

// "female" / "male" / anything else (no answer).
std::optional<bool> gender_field(const json &doc, const char *field) {
    auto it = doc.find(field);
    if (it == doc.end() || !it->is_string()) return std::nullopt;
    const auto &g = it->get_ref<const std::string &>();
    if (g == "female") return true;
    if (g == "male") return false;
    return std::nullopt;
}

double from_confidence(bool female, double confidence) {
    return female ? confidence : 1.0 - confidence;
}

void check_unit(Provider provider, std::string_view payload, double v, const char *what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        bad_payload(provider, payload, std::string(what) + " outside [0, 1]");
    }
}

}  // namespace

GenderEstimate parse_payload(Provider provider, std::string_view payload) {
    json doc = json::parse(payload.begin(), payload.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) bad_payload(provider, payload, "not a JSON object");
    const std::string id(provider_id(provider));

    switch (provider) {
    case Provider::GenderApi: {
        if (doc.contains("errmsg")) bad_payload(provider, payload, "service error");
        const auto female = gender_field(doc, "gender");
        if (!female) return GenderEstimate::provider_unknown(id);
        const double accuracy = number_field(provider, payload, doc, "accuracy") / 100.0;
        check_unit(provider, payload, accuracy, "accuracy");
        return GenderEstimate::from_provider(id, from_confidence(*female, accuracy),
                                             count_field(doc, "samples"));
    }
    case Provider::NamSor: {
        const auto female = gender_field(doc, "likelyGender");
        if (!female) return GenderEstimate::provider_unknown(id);
        double confidence = -1.0;
        if (auto it = doc.find("probabilityCalibrated"); it != doc.end() && it->is_number()) {
            confidence = it->get<double>();
        }
        if (confidence < 0.0) {
            // genderScale runs from -1 (male) to +1 (female)
            const double scale = number_field(provider, payload, doc, "genderScale");
            if (!(scale >= -1.0 && scale <= 1.0)) {
                bad_payload(provider, payload, "genderScale outside [-1, 1]");
            }
            return GenderEstimate::from_provider(id, (scale + 1.0) / 2.0, 0);
        }
        check_unit(provider, payload, confidence, "probabilityCalibrated");
        return GenderEstimate::from_provider(id, from_confidence(*female, confidence), 0);
    }
    case Provider::Genderize: {
        const auto female = gender_field(doc, "gender");
        if (!female) return GenderEstimate::provider_unknown(id);
        const double probability = number_field(provider, payload, doc, "probability");
        check_unit(provider, payload, probability, "probability");
        return GenderEstimate::from_provider(id, from_confidence(*female, probability),
                                             count_field(doc, "count"));
    }
    case Provider::LocalHistorical: {
        const std::uint64_t female = count_field(doc, "female");
        const std::uint64_t male = count_field(doc, "male");
        const int year = doc.value("year", 0);
        if (female + male == 0) return GenderEstimate::unknown(year);
        return GenderEstimate::historical(
            static_cast<double>(female) / static_cast<double>(female + male), female + male, year,
            doc.value("radius", 0));
    }
    }
    bad_payload(provider, payload, "unsupported provider");
}

std::string to_json_line(const ProviderResponse &response) {
    json estimate = {
        {"method", std::string(to_string(response.estimate.method()))},
        {"sample_size", response.estimate.sample_size()},
    };
    if (response.estimate.known()) {
        estimate["p_female"] = response.estimate.p_female();
    } else {
        estimate["p_female"] = nullptr;
    }
    json doc = {
        {"provider", std::string(provider_id(response.provider))},
        {"queried_name", response.queried_name},
        {"raw_payload", response.raw_payload},
        {"fetched_at", response.fetched_at},
        {"estimate", estimate},
    };
    return doc.dump();
}

ProviderResponse response_from_json_line(std::string_view line) {
    json doc = json::parse(line.begin(), line.end());
    ProviderResponse r;
    const auto provider = parse_provider(doc.at("provider").get<std::string>());
    if (!provider) throw std::runtime_error("unknown provider in response line");
    r.provider = *provider;
    r.queried_name = doc.at("queried_name").get<std::string>();
    r.raw_payload = doc.at("raw_payload").get<std::string>();
    r.fetched_at = doc.at("fetched_at").get<std::string>();
    r.estimate = parse_payload(r.provider, r.raw_payload);
    return r;
}

BackCalculatedCounts back_calculate_counts(double accuracy, std::uint64_t samples,
                                           Majority majority) {
    if (samples == 0) throw std::invalid_argument("samples must be positive");
    if (!(accuracy >= 0.5 && accuracy <= 1.0)) {
        throw std::invalid_argument("accuracy must lie in [0.5, 1]");
    }
    const double n = static_cast<double>(samples);
    auto majority_count = static_cast<std::uint64_t>(std::llround(accuracy * n));
    majority_count = std::min(majority_count, samples);
    const std::uint64_t minority_count = samples - majority_count;

    BackCalculatedCounts out;
    if (majority == Majority::Male) {
        out.male_count = majority_count;
        out.female_count = minority_count;
    } else {
        out.female_count = majority_count;
        out.male_count = minority_count;
    }
    const auto larger = std::max(out.male_count, out.female_count);
    out.consistent = std::llround(100.0 * static_cast<double>(larger) / n) ==
                     std::llround(100.0 * accuracy);
    out.small_sample_certainty = accuracy >= 1.0 && samples < kSmallSampleFloor;
    return out;
}

}  // namespace cgaudit
