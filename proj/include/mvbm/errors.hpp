#pragma once

#include <stdexcept>
#include <string>

namespace mvbm {

// Input could not be parsed (bad rational literal, malformed JSON, ...).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Input parsed but violates a domain invariant, or an operation was handed
// inconsistent data (invalid matching, fabricated edge, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// An exhaustive enumeration would exceed its configured budget. Never
// downgraded to sampling: the caller must raise the cap or shrink the input.
class CapExceeded : public std::runtime_error {
public:
    explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mvbm
