#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace debias {

// Flat key=value configuration. '#' lines are comments; later assignments
// and CLI overrides win. Unknown keys are preserved so a file round-trips.
class Config {
public:
    static Config load(const std::string& path);
    static Config from_values(std::map<std::string, std::string> values);

    void set(const std::string& key, const std::string& value);
    void apply_overrides(
        const std::vector<std::pair<std::string, std::string>>& overrides);

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;

    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::uint64_t require_seed() const;

    // Sorted key=value lines; load(serialize()) reproduces the same map.
    std::string serialize() const;
    // FNV-1a over the canonical serialization, 16 hex digits.
    std::string hash() const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// ConfigError unless the key is present and names a readable file.
void require_readable(const Config& config, const std::string& key);

}  // namespace debias
