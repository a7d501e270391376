#pragma once

#include <stdexcept>
#include <string>

namespace linfest {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class SingularityError : public Error { public: using Error::Error; };
class SamplingError : public Error { public: using Error::Error; };
class GeometryError : public Error { public: using Error::Error; };
class IndexError : public Error { public: using Error::Error; };
class PreconditionError : public Error { public: using Error::Error; };
class NumericError : public Error { public: using Error::Error; };
class ConeError : public Error { public: using Error::Error; };
class ConvexityError : public Error { public: using Error::Error; };

// Carries the last residual of a failed nonlinear solve.
class NonconvergenceError : public Error {
public:
    NonconvergenceError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}
    double last_residual() const { return last_residual_; }

private:
    double last_residual_;
};

}  // namespace linfest
