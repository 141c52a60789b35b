#pragma once

#include <stdexcept>
#include <string>

namespace flowmap {

/// Malformed file, config document, or stream. CLI exit code 2.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure cannot continue (non-finite objective, singular
/// system outside the retry path). CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace flowmap
