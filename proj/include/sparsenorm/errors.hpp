#pragma once

#include <stdexcept>
#include <string>

namespace sparsenorm {

/// Bad input shapes, out-of-range parameters, unknown tags.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Singular designs, non-finite intermediate values and similar.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed experiment configuration or unreadable input files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidArgument(msg);
}

}  // namespace sparsenorm
