#pragma once

#include <stdexcept>
#include <string>

namespace ugi {

/// Malformed or mismatched input (shapes, ranges, non-finite entries).
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// An iteration failed to converge or an argument left a series domain.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ugi
