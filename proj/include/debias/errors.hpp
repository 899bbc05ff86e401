#pragma once

#include <stdexcept>
#include <string>

namespace debias {

// Exit-code mapping used by the CLI: ConfigError -> 2, DataError -> 3,
// TransportError -> 4. Everything else is a plain bug.

/// Bad configuration or failed pre-validation (missing path, bad flag combo).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent input data (parse errors, schema errors,
/// integrity violations, undefined metrics on degenerate inputs).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Remote backend failure after retries. Carries the text that was being
/// probed so callers can resume.
class TransportError : public std::runtime_error {
public:
    TransportError(const std::string& msg, std::string failed_text)
        : std::runtime_error(msg), failed_text(std::move(failed_text)) {}

    std::string failed_text;
};

}  // namespace debias
