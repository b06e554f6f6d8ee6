#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gammasum {

/// Iterative evaluation ran out of budget, produced a non-finite value, or
/// otherwise could not deliver a trustworthy number for valid input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The derived matrix C (or a covariance built from it) failed the
/// positive-definiteness check. `leading_minor()` is 1-based.
class NotPositiveDefinite : public std::invalid_argument {
public:
    NotPositiveDefinite(const std::string& what, std::size_t leading_minor)
        : std::invalid_argument(what), leading_minor_(leading_minor) {}

    std::size_t leading_minor() const noexcept { return leading_minor_; }

private:
    std::size_t leading_minor_;
};

}  // namespace gammasum
