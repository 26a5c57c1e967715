#pragma once

#include <stdexcept>
#include <string>

namespace ukp {

// Error categories used across the library. Each maps to one failure class:
// shape mismatches, invalid geometry, training aborts, autograd graph misuse,
// file parsing, metric preconditions, shape generation, and IO.

struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& msg) : std::runtime_error("dimension error: " + msg) {}
};

struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& msg) : std::runtime_error("geometry error: " + msg) {}
};

struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& msg) : std::runtime_error("training error: " + msg) {}
};

struct GraphError : std::runtime_error {
    explicit GraphError(const std::string& msg) : std::runtime_error("graph error: " + msg) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error("parse error: " + msg) {}
};

struct MetricError : std::runtime_error {
    explicit MetricError(const std::string& msg) : std::runtime_error("metric error: " + msg) {}
};

struct GenerationError : std::runtime_error {
    explicit GenerationError(const std::string& msg) : std::runtime_error("generation error: " + msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error("io error: " + msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("config error: " + msg) {}
};

}  // namespace ukp
