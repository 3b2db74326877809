#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qtunnel {

/// Input-format violation (CSV schema, malformed row, duplicate date).
/// `line` is the 1-based line number when known, 0 otherwise.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Numerical routine failed to meet its contract (tolerance, convergence).
/// Carries the best estimate and diagnostics so callers can report them.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double best_estimate, double achieved_error,
                 std::size_t iterations)
        : std::runtime_error(what),
          best_estimate_(best_estimate),
          achieved_error_(achieved_error),
          iterations_(iterations) {}

    double best_estimate() const { return best_estimate_; }
    double achieved_error() const { return achieved_error_; }
    std::size_t iterations() const { return iterations_; }

private:
    double best_estimate_;
    double achieved_error_;
    std::size_t iterations_;
};

}  // namespace qtunnel
