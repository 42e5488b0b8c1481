#pragma once

#include <stdexcept>
#include <string>

namespace esmda {

/// Invalid user input: malformed config files, schema violations,
/// inconsistent dimensions, rejected schedules. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure at run time: singular analysis matrix, non-finite
/// forward-model output, factorization breakdown. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace esmda
