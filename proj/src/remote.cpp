#include "debias/remote.hpp"

#include <thread>

#include "debias/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace debias {

RateLimiter::RateLimiter(double qps) {
    if (qps > 0) {
        interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(1.0 / qps));
    }
}

void RateLimiter::acquire() {
    if (interval_.count() == 0) return;
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto now = std::chrono::steady_clock::now();
        if (next_ < now) next_ = now;
        slot = next_;
        next_ += interval_;
    }
    std::this_thread::sleep_until(slot);
}

namespace {

// Splits "http://host:port/path" into host part and path part.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint must include a scheme: " + endpoint);
    }
    auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {endpoint, "/"};
    }
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteConfig config)
    : config_(std::move(config)), limiter_(config_.qps) {
    std::tie(host_, path_) = split_endpoint(config_.endpoint);
}

PredictionDistribution RemoteBackend::predict(const std::string& text) {
    nlohmann::json body_json;
    body_json["text"] = text;
    std::string body = body_json.dump();

    httplib::Headers headers;
    if (!config_.auth_header.empty()) {
        auto colon = config_.auth_header.find(':');
        if (colon == std::string::npos) {
            throw ConfigError("auth header must be 'Name: Value': " +
                              config_.auth_header);
        }
        std::string name = config_.auth_header.substr(0, colon);
        std::string value = config_.auth_header.substr(colon + 1);
        while (!value.empty() && value.front() == ' ') value.erase(0, 1);
        headers.emplace(name, value);
    }

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(config_.backoff_base * (1 << (attempt - 1)));
        }
        limiter_.acquire();
        httplib::Client client(host_);
        client.set_connection_timeout(5, 0);
        client.set_read_timeout(10, 0);
        auto res = client.Post(path_, headers, body, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP status " + std::to_string(res->status);
            continue;
        }
        try {
            auto parsed = nlohmann::json::parse(res->body);
            double p = parsed.at("p_hateful").get<double>();
            if (!(p >= 0.0 && p <= 1.0)) {
                last_error = "p_hateful out of [0,1]: " + std::to_string(p);
                continue;
            }
            return PredictionDistribution{p, 1.0 - p};
        } catch (const nlohmann::json::exception& e) {
            last_error = std::string("unparseable response: ") + e.what();
            continue;
        }
    }
    throw TransportError("remote prediction failed after " +
                             std::to_string(config_.max_retries + 1) +
                             " attempts (" + last_error + ")",
                         text);
}

}  // namespace debias
