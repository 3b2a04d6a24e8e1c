#pragma once

#include <stdexcept>
#include <string>

namespace cartan {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A supplied basis is not closed under the matrix commutator.
struct BasisClosureError : Error {
  using Error::Error;
};

struct SingularMatrixError : Error {
  using Error::Error;
};

struct StepTooLarge : Error {
  using Error::Error;
};

// Evaluation outside a chart, or a coefficient callable failed.
struct DomainError : Error {
  using Error::Error;
};

struct SolderingSingular : Error {
  using Error::Error;
};

struct MutationInvalid : Error {
  using Error::Error;
};

struct LoopNotClosed : Error {
  using Error::Error;
};

struct CurvatureTooSmall : Error {
  using Error::Error;
};

struct DegenerateCurve : Error {
  using Error::Error;
};

struct UnknownGeometry : Error {
  using Error::Error;
};

struct BadParams : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace cartan
