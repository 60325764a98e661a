#include "cgaudit/estimate.h"

#include <stdexcept>

namespace cgaudit {

std::string_view to_string(EstimateMethod method) noexcept {
    switch (method) {
    case EstimateMethod::HistoricalModel: return "historical";
    case EstimateMethod::Provider: return "provider";
    case EstimateMethod::GroundTruth: return "ground_truth";
    case EstimateMethod::Unknown: return "unknown";
    }
    return "unknown";
}

GenderEstimate GenderEstimate::unknown(std::optional<int> query_year) {
    GenderEstimate e;
    e.query_year_ = query_year;
    return e;
}

GenderEstimate GenderEstimate::historical(double p_female, std::uint64_t sample_size,
                                          int query_year, int window_radius) {
    GenderEstimate e;
    e.p_female_ = p_female;
    e.sample_size_ = sample_size;
    e.method_ = EstimateMethod::HistoricalModel;
    e.query_year_ = query_year;
    e.window_radius_ = window_radius;
    return e;
}

GenderEstimate GenderEstimate::from_provider(std::string provider, double p_female,
                                             std::uint64_t sample_size) {
    if (!(p_female >= 0.0 && p_female <= 1.0)) {
        throw std::invalid_argument("p_female outside [0, 1]");
    }
    GenderEstimate e;
    e.p_female_ = p_female;
    e.sample_size_ = sample_size;
    e.method_ = EstimateMethod::Provider;
    e.provider_ = std::move(provider);
    return e;
}

GenderEstimate GenderEstimate::ground_truth(double p_female) {
    if (!(p_female >= 0.0 && p_female <= 1.0)) {
        throw std::invalid_argument("p_female outside [0, 1]");
    }
    GenderEstimate e;
    e.p_female_ = p_female;
    e.method_ = EstimateMethod::GroundTruth;
    return e;
}

GenderEstimate GenderEstimate::provider_unknown(std::string provider) {
    GenderEstimate e;
    e.provider_ = std::move(provider);
    return e;
}

double GenderEstimate::p_female() const {
    if (!p_female_) throw std::logic_error("p_female of an unknown estimate");
    return *p_female_;
}

}  // namespace cgaudit
