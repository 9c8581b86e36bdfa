// errors.hpp — exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace lsq {

// Base class for every error the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Model/input errors. The CLI maps these to exit code 2.
class ModelError : public Error {
public:
    using Error::Error;
};

class NonHermitianInput : public ModelError { public: using ModelError::ModelError; };
class DomainError       : public ModelError { public: using ModelError::ModelError; };
class IndexError        : public ModelError { public: using ModelError::ModelError; };
class DimensionMismatch : public ModelError { public: using ModelError::ModelError; };
class DimensionCap      : public ModelError { public: using ModelError::ModelError; };
class NonLinearAction   : public ModelError { public: using ModelError::ModelError; };
class InvalidExponent   : public ModelError { public: using ModelError::ModelError; };
class NotUnital         : public ModelError { public: using ModelError::ModelError; };
class NegativeInput     : public ModelError { public: using ModelError::ModelError; };
class NotPrimitive      : public ModelError { public: using ModelError::ModelError; };
class NotReversible     : public ModelError { public: using ModelError::ModelError; };
class NegativeRate      : public ModelError { public: using ModelError::ModelError; };
class InvalidEpsilon    : public ModelError { public: using ModelError::ModelError; };
class SeriesDiverges    : public ModelError { public: using ModelError::ModelError; };
class DegenerateWitness : public ModelError { public: using ModelError::ModelError; };
class ConfigError       : public ModelError { public: using ModelError::ModelError; };
class UnknownColumn     : public ModelError { public: using ModelError::ModelError; };

// Mathematical invariant failures. The CLI maps these to exit code 3.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

class GibbsNotStationary    : public InvariantViolation { public: using InvariantViolation::InvariantViolation; };
class EigenResidualExceeded : public InvariantViolation { public: using InvariantViolation::InvariantViolation; };
class BoundViolated         : public InvariantViolation { public: using InvariantViolation::InvariantViolation; };

} // namespace lsq
