#pragma once

#include <stdexcept>
#include <string>

namespace qcorr {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// qstate
struct NonHermitian : Error { using Error::Error; };
struct SingularPower : Error { using Error::Error; };
struct BadSubsystem : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct InvalidState : Error { using Error::Error; };

// entropy
struct InvalidAlpha : Error { using Error::Error; };
struct InvalidKind : Error { using Error::Error; };

// correlation
struct NoConvergence : Error { using Error::Error; };
struct UnsupportedKind : Error { using Error::Error; };
struct OutOfClosedFormRange : Error { using Error::Error; };

// ising
struct QuadratureFailure : Error { using Error::Error; };
struct BadSize : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };
struct NotPSD : Error { using Error::Error; };

// qpt
struct TooFewPoints : Error { using Error::Error; };
struct NoInteriorPeak : Error { using Error::Error; };
struct HalfHeightNotBracketed : Error { using Error::Error; };
struct DegenerateFit : Error { using Error::Error; };

// io / cli
struct ParseError : Error { using Error::Error; };

} // namespace qcorr
