// error.hpp: exception types shared across the library

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace magbat {

// Integration blow-up, failed convergence, or any other numerical breakdown.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Second-order perturbation hit an intermediate state degenerate with the
// initial one while carrying a nonzero path amplitude.
class DegenerateStateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Malformed or inconsistent configuration text. Carries the offending key and
// the 1-based line number (0 when the problem is not tied to a single line).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, std::size_t line, const std::string& what)
        : std::runtime_error(format(key, line, what)), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& key, std::size_t line, const std::string& what) {
        std::string out = "config error";
        if (line > 0) out += " at line " + std::to_string(line);
        if (!key.empty()) out += " (key '" + key + "')";
        return out + ": " + what;
    }

    std::string key_;
    std::size_t line_{0};
};

} // namespace magbat
