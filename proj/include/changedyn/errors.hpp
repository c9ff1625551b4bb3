#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace changedyn {

struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Every particle likelihood vanished at one step; carries the step index so
// the caller can decide whether to abort or restart.
struct DegenerateLikelihoodError : std::runtime_error {
    explicit DegenerateLikelihoodError(std::int64_t t)
        : std::runtime_error("all particle weights vanished at t=" + std::to_string(t)),
          time(t) {}
    std::int64_t time;
};

struct NoNullHypothesisError : std::runtime_error {
    NoNullHypothesisError()
        : std::runtime_error("no null-hypothesis particles; detection should fire first") {}
};

struct DegenerateInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularFitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CsvError : std::runtime_error {
    CsvError(std::size_t row_, const std::string& what)
        : std::runtime_error("csv row " + std::to_string(row_) + ": " + what), row(row_) {}
    explicit CsvError(const std::string& what) : std::runtime_error(what), row(0) {}
    std::size_t row;
};

}  // namespace changedyn
