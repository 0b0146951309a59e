#pragma once

#include <stdexcept>
#include <string>

namespace thgame {

/// Raised when parameters or inputs violate a documented precondition.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a text input (disorder file, range string) cannot be parsed.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace thgame
