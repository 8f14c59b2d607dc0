#pragma once

#include <stdexcept>
#include <string>

namespace ajk {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfDomain : Error {
    using Error::Error;
};
struct QuadratureFailure : Error {
    using Error::Error;
};
struct PreconditionViolated : Error {
    using Error::Error;
};
struct DomainViolation : Error {
    using Error::Error;
};
struct DivergentIntegral : Error {
    using Error::Error;
};
struct NotAnAtom : Error {
    using Error::Error;
};
struct InvalidParameter : Error {
    using Error::Error;
};
struct InvalidProbability : InvalidParameter {
    using InvalidParameter::InvalidParameter;
};
struct InvalidRate : InvalidParameter {
    using InvalidParameter::InvalidParameter;
};
struct InvalidTimes : InvalidParameter {
    using InvalidParameter::InvalidParameter;
};
struct InvalidNoise : InvalidParameter {
    using InvalidParameter::InvalidParameter;
};

// Solver left the admissible region: ||psi|| crossed the blow-up cap.
struct BlowUp : Error {
    double time;
    explicit BlowUp(double t, const std::string& msg) : Error(msg), time(t) {}
};

// Re psi on a nonnegative coordinate drifted above tolerance.
struct DomainExit : Error {
    double time;
    explicit DomainExit(double t, const std::string& msg) : Error(msg), time(t) {}
};

struct InsufficientPaths : Error {
    using Error::Error;
};

}  // namespace ajk
