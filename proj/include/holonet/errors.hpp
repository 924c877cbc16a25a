#ifndef HOLONET_ERRORS_HPP
#define HOLONET_ERRORS_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace holonet
{

/// Invalid network description, config file or dataset. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Failure while evaluating or integrating the dynamics. Maps to CLI exit code 2.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// The multiplier system had a non-positive pivot: the constraint gradients are
/// not linearly independent at the evaluation point.
class IndefiniteSystemError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

/// Cauchy data violates g(0) = 0 or dg/dt(0) = 0.
class InconsistentInitialDataError : public NumericalError
{
public:
    InconsistentInitialDataError(const std::string& what, Eigen::Index constraint)
        : NumericalError(what), constraint_(constraint)
    {
    }

    Eigen::Index constraint() const noexcept { return constraint_; }

private:
    Eigen::Index constraint_;
};

/// The state became non-finite during integration.
class BlowUpError : public NumericalError
{
public:
    BlowUpError(const std::string& what, double time) : NumericalError(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

} // namespace holonet

#endif // HOLONET_ERRORS_HPP
