#pragma once

#include <stdexcept>

namespace dateiv {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// population
class NoCompliersError : public Error { public: using Error::Error; };
class NotDeterministicError : public Error { public: using Error::Error; };

// causal Bayes net
class CyclicGraphError : public Error { public: using Error::Error; };
class UnknownVariableError : public Error { public: using Error::Error; };
class UnknownValueError : public Error { public: using Error::Error; };
class OverlappingAssignmentsError : public Error { public: using Error::Error; };
class ZeroProbabilityConditionError : public Error { public: using Error::Error; };
class ZeroProbabilityEvidenceError : public Error { public: using Error::Error; };

// instrumental-variable estimand
class ZeroDenominatorError : public Error { public: using Error::Error; };

// trial simulation
class EmptyArmError : public Error { public: using Error::Error; };
class ZeroSampleDenominatorError : public Error { public: using Error::Error; };

// scenario files and construction
class ParseError : public Error { public: using Error::Error; };
class RangeError : public Error { public: using Error::Error; };
class DuplicateIdError : public Error { public: using Error::Error; };
class UnknownScenarioError : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };

/// Structural invariant breaches (malformed nets, assignments, populations).
class ValidationError : public Error { public: using Error::Error; };

}  // namespace dateiv
