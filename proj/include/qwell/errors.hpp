#ifndef QWELL_ERRORS_HPP
#define QWELL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qwell {

/// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// numerics
struct NoSignChange : Error { using Error::Error; };
struct MaxIterations : Error { using Error::Error; };
struct TailNotNegligible : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };

// potentials / units
struct UnknownUnit : Error { using Error::Error; };

// eigensolver
struct OutOfWindow : Error { using Error::Error; };
struct NoStatesFound : Error { using Error::Error; };
struct NotNormalizable : Error { using Error::Error; };
struct InvalidIndex : Error { using Error::Error; };

// quantum_state
struct UnknownPair : Error { using Error::Error; };
struct GridTooNarrow : Error { using Error::Error; };

// infomeasures
struct NegativeVariance : Error { using Error::Error; };
struct NotNormalized : Error { using Error::Error; };
struct ZeroProbabilityTerm : Error { using Error::Error; };
struct InvalidOrder : Error { using Error::Error; };
struct ConvolutionUnderresolved : Error { using Error::Error; };
struct BoundViolation : Error { using Error::Error; };

// cli_pipeline
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct IncompatibleSampling : Error { using Error::Error; };

}  // namespace qwell

#endif  // QWELL_ERRORS_HPP
