#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gbs_page {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated (bad range, bad shape, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A series evaluation hit its term cap before reaching the requested
/// tolerance. Carries the partial value so callers can still report it.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, double partial_value,
                    double error_bound, int terms_used)
        : Error(what),
          partial_value_(partial_value),
          error_bound_(error_bound),
          terms_used_(terms_used) {}

    double partial_value() const noexcept { return partial_value_; }
    double error_bound() const noexcept { return error_bound_; }
    int terms_used() const noexcept { return terms_used_; }

private:
    double partial_value_;
    double error_bound_;
    int terms_used_;
};

/// Floating point produced something unphysical (symplectic eigenvalue
/// below one, failed factorization, non-finite entropy).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A numerical failure inside a Monte-Carlo run, tagged with the sample.
class SampleError : public NumericalError {
public:
    SampleError(const std::string& what, std::uint64_t sample_index)
        : NumericalError("sample " + std::to_string(sample_index) + ": " + what),
          sample_index_(sample_index) {}

    std::uint64_t sample_index() const noexcept { return sample_index_; }

private:
    std::uint64_t sample_index_;
};

}  // namespace gbs_page
