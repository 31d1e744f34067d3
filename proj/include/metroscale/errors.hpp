#pragma once

#include <stdexcept>
#include <string>

namespace metroscale {

// Base class for everything this library throws on bad input or a failed
// computation.  Callers that only care about "did it work" can catch this.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// CSV that cannot be tokenized; message carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : Error("parse error at line " + std::to_string(line) + ": " + msg),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Header present but a mandatory column is missing or misnamed.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& msg) : Error("schema error: " + msg) {}
};

// Rows that violate domain invariants (non-positive population, etc).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg)
        : Error("validation error: " + msg) {}
};

// A model fit that cannot even be started (no feasible initialization,
// degenerate predictor, rank deficiency).
class FitError : public Error {
public:
    explicit FitError(const std::string& msg) : Error("fit error: " + msg) {}
};

// Statistic undefined for the given input (zero variance and the like).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error("domain error: " + msg) {}
};

}  // namespace metroscale
