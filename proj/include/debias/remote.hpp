#pragma once

#include <chrono>
#include <mutex>
#include <string>

#include "debias/classifier.hpp"

namespace debias {

// Serializes callers so requests start at least 1/qps apart.
class RateLimiter {
public:
    explicit RateLimiter(double qps);  // qps <= 0 disables limiting
    void acquire();

private:
    std::chrono::steady_clock::duration interval_{};
    std::chrono::steady_clock::time_point next_{};
    std::mutex mu_;
};

struct RemoteConfig {
    std::string endpoint;        // http://host:port/path
    double qps = 0.0;
    std::string auth_header;     // "Name: Value", optional
    int max_retries = 5;
    std::chrono::milliseconds backoff_base{200};
};

// POSTs {"text": ...} and expects {"p_hateful": ...}; retries transient
// failures with exponential backoff, then raises a transport error that
// carries the text so callers can resume.
class RemoteBackend : public ClassifierBackend {
public:
    explicit RemoteBackend(RemoteConfig config);
    PredictionDistribution predict(const std::string& text) override;

private:
    RemoteConfig config_;
    std::string host_;       // scheme://host:port
    std::string path_;
    RateLimiter limiter_;
};

}  // namespace debias
