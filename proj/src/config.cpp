#include "debias/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "debias/det_rng.hpp"
#include "debias/errors.hpp"

namespace debias {
namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    Config config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config " + path + ":" + std::to_string(line_no) +
                              ": expected key=value");
        }
        std::string key = trim(t.substr(0, eq));
        if (key.empty()) {
            throw ConfigError("config " + path + ":" + std::to_string(line_no) +
                              ": empty key");
        }
        config.values_[key] = trim(t.substr(eq + 1));
    }
    return config;
}

Config Config::from_values(std::map<std::string, std::string> values) {
    Config config;
    config.values_ = std::move(values);
    return config;
}

void Config::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

void Config::apply_overrides(
    const std::vector<std::pair<std::string, std::string>>& overrides) {
    for (const auto& [key, value] : overrides) values_[key] = value;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::optional<std::string> Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string Config::get_or(const std::string& key,
                           const std::string& fallback) const {
    auto v = get(key);
    return v ? *v : fallback;
}

std::string Config::require(const std::string& key) const {
    auto v = get(key);
    if (!v) throw ConfigError("missing required config key '" + key + "'");
    return *v;
}

std::int64_t Config::get_int(const std::string& key,
                             std::int64_t fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        std::int64_t parsed = std::stoll(*v, &used);
        if (used != v->size()) throw std::invalid_argument(*v);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not an integer: " + *v);
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        double parsed = std::stod(*v, &used);
        if (used != v->size()) throw std::invalid_argument(*v);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a number: " + *v);
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError("config key '" + key + "' is not a boolean: " + *v);
}

std::uint64_t Config::require_seed() const {
    std::string v = require("seed");
    try {
        std::size_t used = 0;
        std::uint64_t parsed = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key 'seed' is not an unsigned integer: " + v);
    }
}

std::string Config::serialize() const {
    std::ostringstream out;
    for (const auto& [key, value] : values_) out << key << "=" << value << "\n";
    return out.str();
}

std::string Config::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(serialize())));
    return buf;
}

void require_readable(const Config& config, const std::string& key) {
    std::string path = config.require(key);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("config key '" + key + "': cannot read file " + path);
    }
}

}  // namespace debias
