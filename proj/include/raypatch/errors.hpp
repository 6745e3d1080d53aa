#pragma once

#include <stdexcept>
#include <string>

namespace raypatch {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad inputs: mismatched dimensions, broken invariants, unusable geometry.
struct ValidationError : Error {
    using Error::Error;
};

/// A computation could not produce a result: degenerate, infeasible,
/// unbounded, or otherwise numerically impossible.
struct NumericError : Error {
    using Error::Error;
};

/// File and format failures.
struct IoError : Error {
    using Error::Error;
};

struct BehindCameraError : ValidationError {
    using ValidationError::ValidationError;
};

struct EmptyMaskError : ValidationError {
    using ValidationError::ValidationError;
};

struct DimensionMismatchError : ValidationError {
    using ValidationError::ValidationError;
};

struct LengthMismatchError : ValidationError {
    using ValidationError::ValidationError;
};

struct GridMismatchError : ValidationError {
    using ValidationError::ValidationError;
};

struct TooFewCorrespondencesError : NumericError {
    using NumericError::NumericError;
};

struct DegenerateFitError : NumericError {
    using NumericError::NumericError;
};

struct NoPositiveScaleError : NumericError {
    using NumericError::NumericError;
};

struct InfeasibleError : NumericError {
    using NumericError::NumericError;
};

struct UnboundedError : NumericError {
    using NumericError::NumericError;
};

struct NonPositiveDepthError : NumericError {
    using NumericError::NumericError;
};

struct NonPositiveDenominatorError : NumericError {
    using NumericError::NumericError;
};

}  // namespace raypatch
