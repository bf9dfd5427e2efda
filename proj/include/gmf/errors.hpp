#pragma once

#include <stdexcept>
#include <string>

namespace gmf {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// graph construction / validation
struct AsymmetricWeights : Error { using Error::Error; };
struct NegativeWeight : Error { using Error::Error; };
struct NonzeroDiagonal : Error { using Error::Error; };
struct IsolatedVertex : Error { using Error::Error; };
struct ZeroDegreeVertex : Error { using Error::Error; };
struct TooSmall : Error { using Error::Error; };

// shape / kind mismatches
struct DimensionMismatch : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct OperatorKindMismatch : Error { using Error::Error; };
struct TraceMismatch : Error { using Error::Error; };

// spectral
struct NotDiagonalizable : Error { using Error::Error; };

// matched filter
struct BadVertexIndex : Error { using Error::Error; };
struct EmptyBank : Error { using Error::Error; };

// coarsening
struct NegativeSignal : Error { using Error::Error; };

// experiments / io
struct CorruptCheckpoint : Error { using Error::Error; };
struct FileError : Error { using Error::Error; };

}  // namespace gmf
