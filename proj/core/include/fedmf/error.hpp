#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fedmf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape mismatch, out-of-range parameter, malformed configuration value.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A matrix that must have full (column) rank is numerically rank deficient.
class RankDeficient : public Error {
public:
    RankDeficient(const std::string& what, double sigma_min)
        : Error(what), sigma_min_(sigma_min) {}

    double sigma_min() const noexcept { return sigma_min_; }

private:
    double sigma_min_;
};

/// Input file could not be parsed; carries the 1-based offending line.
class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& msg)
        : Error(file + ":" + std::to_string(line) + ": " + msg), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Threshold-mode resampling gave up after its draw budget.
class ThresholdUnmet : public Error {
public:
    ThresholdUnmet(const std::string& what, double best_kappa)
        : Error(what), best_kappa_(best_kappa) {}

    double best_kappa() const noexcept { return best_kappa_; }

private:
    double best_kappa_;
};

}  // namespace fedmf
