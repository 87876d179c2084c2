#pragma once

#include <stdexcept>
#include <string>

namespace fpvault {

// Malformed input file (template, transform, descriptor, or vault blob).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what)
        : std::runtime_error(what)
    {
    }
};

// A template did not yield enough usable features to enroll.
class FailureToCapture : public std::runtime_error {
public:
    explicit FailureToCapture(const std::string& what)
        : std::runtime_error(what)
    {
    }
};

// Chaff generation could not place the requested number of points.
class ChaffPlacementFailure : public std::runtime_error {
public:
    explicit ChaffPlacementFailure(const std::string& what)
        : std::runtime_error(what)
    {
    }
};

// Synthetic data generation could not satisfy its constraints.
class GenerationError : public std::runtime_error {
public:
    explicit GenerationError(const std::string& what)
        : std::runtime_error(what)
    {
    }
};

} // namespace fpvault
