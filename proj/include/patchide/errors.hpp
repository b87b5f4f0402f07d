#pragma once

#include <stdexcept>
#include <string>

namespace patchide {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// landscape
class PointOutsideDomain : public Error { using Error::Error; };
class PointOnInterface : public Error { using Error::Error; };
class InvalidSampleCount : public Error { using Error::Error; };
class InvalidModel : public Error { using Error::Error; };

// discretize
class InvalidResolution : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };

// spectral / dynamics / threshold. These are the numerical failures (CLI exit 3).
class NumericalFailure : public Error { using Error::Error; };
class NoConvergence : public NumericalFailure { using NumericalFailure::NumericalFailure; };
class NonPositiveIterate : public NumericalFailure { using NumericalFailure::NumericalFailure; };
class EpsilonSearchFailed : public NumericalFailure { using NumericalFailure::NumericalFailure; };
class BracketMismatch : public NumericalFailure { using NumericalFailure::NumericalFailure; };
class Disagreement : public NumericalFailure { using NumericalFailure::NumericalFailure; };
class NonMonotoneCrossing : public NumericalFailure { using NumericalFailure::NumericalFailure; };

class PreconditionUnmet : public Error { using Error::Error; };
class InvariantViolation : public Error { using Error::Error; };

// config / io
class ParseError : public Error { using Error::Error; };
class ValidationError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

}  // namespace patchide
