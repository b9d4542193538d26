#pragma once

#include <stdexcept>
#include <string>

namespace gasca {

/// Configuration / input-file problems. The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Training aborts (non-finite losses or parameters). CLI exit code 3.
class TrainError : public std::runtime_error {
public:
    explicit TrainError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gasca
