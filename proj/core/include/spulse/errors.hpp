#pragma once

#include <stdexcept>
#include <string>

namespace spulse {

/// Base of every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Field mean exceeds mean_tol * ||f||_2, so inverse-power symbols are undefined.
class MeanNotZero : public Error {
public:
    using Error::Error;
};

/// Symbol evaluated to inf/nan at a frequency that carries energy.
class NonFiniteSymbol : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class UnderResolved : public Error {
public:
    using Error::Error;
};

class OutOfBox : public Error {
public:
    using Error::Error;
};

class QuadratureUnderResolved : public Error {
public:
    using Error::Error;
};

class StepRejected : public Error {
public:
    using Error::Error;
};

/// Raised by the trajectory monitors; `time` is where the violation was seen.
class MonitorViolation : public Error {
public:
    MonitorViolation(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

class BlowUp : public MonitorViolation {
public:
    using MonitorViolation::MonitorViolation;
};

class WrapAround : public MonitorViolation {
public:
    using MonitorViolation::MonitorViolation;
};

class MeanDrift : public MonitorViolation {
public:
    using MonitorViolation::MonitorViolation;
};

class MissingSnapshots : public Error {
public:
    MissingSnapshots(const std::string& what, double first_missing)
        : Error(what), first_missing_(first_missing) {}
    double first_missing() const { return first_missing_; }

private:
    double first_missing_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace spulse
