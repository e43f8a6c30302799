#pragma once

#include <stdexcept>
#include <string>

namespace plab {

/// Parameter or argument outside the admissible domain of an operation.
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// A covariance matrix could not be factorized even after the full jitter ladder.
class ConditioningError : public std::runtime_error
{
public:
    ConditioningError(const std::string& what, double min_eigenvalue)
        : std::runtime_error(what), min_eigenvalue_(min_eigenvalue)
    {
    }

    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

/// Monte Carlo budget too small to resolve the requested event.
class BudgetError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A fit could not be performed on the supplied series.
class FitError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

}  // namespace plab
