#pragma once

#include <stdexcept>
#include <string>

namespace gyro {

/// Base of every error raised by the library. Numerical failures derive from
/// NumericalError so that callers (the CLI) can map them to one exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class PreconditionViolation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularMap : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateDenominator : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StepTooLarge : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class VelocitiesDiffer : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class OutsideDomain : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class MismatchedObserver : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonTimelike : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotMeaningful : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ValidationFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Raised by configuration parsing; `field` names the offending key.
class ConfigInvalid : public Error {
public:
    ConfigInvalid(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field))
    {
    }

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace gyro
